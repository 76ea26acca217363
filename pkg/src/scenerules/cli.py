"""Terminal front door: interactive REPL and scripted batch replay.

The script grammar is the REPL grammar, so recorded transcripts double as
golden tests: plain lines are utterances, `:`-lines are meta commands, and
`expect rule "..."` asserts on the most recent induction.
"""
from __future__ import annotations

import argparse
import shlex
import sys

from . import grounder, perception
from .induction import InductionError, InductionParams, render_rules
from .kb import KBError
from .nlu import UtteranceParser, load_lexicon, load_patterns
from .service import DialogueEngine, Session, load_templates

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EXPECT_FAILED = 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="scenerules",
        description="Scene dialogue REPL with rule induction")
    p.add_argument("--scene", help="scene file to ingest at startup")
    p.add_argument("--embeddings", help="word-vector file (token f1 .. fD)")
    p.add_argument("--patterns", help="NLU pattern table file")
    p.add_argument("--lexicon", help="NLU value lexicon file")
    p.add_argument("--kb", help="KB snapshot to load at startup")
    p.add_argument("--batch", metavar="SCRIPT",
                   help="run a script instead of the interactive REPL")
    p.add_argument("--m", type=float, default=1.0,
                   help="m-estimate smoothing (default 1.0)")
    p.add_argument("--max-body", type=int, default=3,
                   help="max clause body length (default 3)")
    p.add_argument("--tau", type=float, default=0.5,
                   help="disambiguation confidence-ratio floor")
    p.add_argument("--iou-threshold", type=float, default=0.5)
    return p


class CliError(Exception):
    pass


class ExpectFailed(Exception):
    pass


class Repl:
    def __init__(self, args, out=sys.stdout):
        self.out = out
        patterns = load_patterns(args.patterns) if args.patterns else None
        lexicon = load_lexicon(args.lexicon) if args.lexicon else None
        table = (grounder.load_embeddings(args.embeddings)
                 if args.embeddings else grounder.bundled_embeddings())
        self.engine = DialogueEngine(UtteranceParser(patterns, lexicon), table)
        self.session: Session = self.engine.create_session()
        self.session.params = InductionParams(m=args.m,
                                              max_body_len=args.max_body)
        self.tau = args.tau
        self.last_rules: list[str] = []
        if args.kb:
            from .kb import KnowledgeBase
            self.session.kb = KnowledgeBase.load(args.kb)
        if args.scene:
            frame = perception.load_scene(args.scene)
            ids = self.engine.ingest_scene(self.session, frame,
                                           args.iou_threshold)
            self._say(f"[scene] {len(ids)} entities from {frame.image_id!r}")

    def _say(self, text: str):
        print(text, file=self.out)

    # -- commands ----------------------------------------------------------

    def execute(self, line: str) -> bool:
        """Run one script/REPL line; returns False on :quit."""
        line = line.strip()
        if not line or line.startswith("#"):
            return True
        if line.startswith(":"):
            return self._meta(line)
        if line.startswith("expect "):
            self._expect(line)
            return True
        reply, _ = self.engine.handle_utterance(self.session, line)
        self._say(reply)
        return True

    def _meta(self, line: str) -> bool:
        parts = shlex.split(line)
        cmd, args = parts[0], parts[1:]
        if cmd == ":quit":
            return False
        if cmd == ":kb":
            self._say(self.session.kb.to_document())
        elif cmd == ":rules":
            for (attr, value), rs in self.session.rulesets.items():
                self._say(f"# {attr}={value}")
                self._say(render_rules(rs).rstrip("\n") or "(no rule)")
        elif cmd == ":induce":
            if len(args) != 2:
                raise CliError(":induce needs <attr> <value>")
            try:
                rs = self.engine.induce(self.session, args[0], args[1])
            except InductionError as exc:
                self._say(f"error: {exc}")
                self.last_rules = []
                return True
            self.last_rules = render_rules(rs).splitlines()
            for rule in self.last_rules or ["(no rule)"]:
                self._say(rule)
        elif cmd == ":apply":
            if len(args) != 2:
                raise CliError(":apply needs <attr> <value>")
            try:
                records = self.engine.apply(self.session, args[0], args[1])
            except KeyError as exc:
                self._say(f"error: {exc}")
                return True
            for r in records:
                self._say(r.render())
            self._say(f"[apply] {len(records)} inferred")
        elif cmd == ":save":
            if len(args) != 1:
                raise CliError(":save needs <path>")
            self.session.kb.save(args[0])
            self._say(f"[saved] {args[0]}")
        else:
            raise CliError(f"unknown command {cmd}")
        return True

    def _expect(self, line: str):
        parts = shlex.split(line)
        if len(parts) != 3 or parts[1] != "rule":
            raise CliError('expect syntax: expect rule "<clause>"')
        wanted = parts[2]
        if wanted not in self.last_rules:
            raise ExpectFailed(
                f"expected rule {wanted!r}, got {self.last_rules!r}")
        self._say(f"[ok] {wanted}")

    # -- report ------------------------------------------------------------

    def report(self):
        self._say("== report ==")
        for entity in self.session.kb.entities():
            attrs = ", ".join(f"{a}={v}" for a, (v, _) in
                              entity.assignments.items())
            self._say(f"{entity.id}: {attrs}")
        for (attr, value), rs in self.session.rulesets.items():
            self._say(f"rules {attr}={value}: "
                      + (" ".join(render_rules(rs).splitlines()) or "(none)"))


def run_batch(repl: Repl, script_path: str) -> int:
    with open(script_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            try:
                if not repl.execute(line):
                    break
            except ExpectFailed as exc:
                print(f"{script_path}:{lineno}: {exc}", file=sys.stderr)
                return EXIT_EXPECT_FAILED
            except (CliError, KBError) as exc:
                print(f"{script_path}:{lineno}: {exc}", file=sys.stderr)
                return EXIT_ERROR
    repl.report()
    return EXIT_OK


def run_repl(repl: Repl) -> int:
    print("scenerules repl; :quit to exit", file=repl.out)
    while True:
        try:
            line = input("> ")
        except EOFError:
            break
        try:
            if not repl.execute(line):
                break
        except ExpectFailed as exc:
            print(f"expect failed: {exc}", file=repl.out)
        except Exception as exc:  # REPL never crashes on bad input
            print(f"error: {exc}", file=repl.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    import os
    for path_arg in ("scene", "embeddings", "patterns", "lexicon", "kb",
                     "batch"):
        path = getattr(args, path_arg)
        if path and not os.path.exists(path):
            print(f"error: no such file: {path}", file=sys.stderr)
            return EXIT_ERROR
    try:
        repl = Repl(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.batch:
        return run_batch(repl, args.batch)
    return run_repl(repl)


if __name__ == "__main__":
    sys.exit(main())
