// Client-side dry run of rule application: which entities would gain the
// target attribute if /apply were called now.  Mirrors the server's
// forward-chaining pass so the UI can show a diff before committing.
import type {
  ClausePayload,
  EntityRecord,
  KbDocument,
  RulesetPayload,
} from "./types.js";

export interface PendingInference {
  entity: string;
  attribute: string;
  value: string;
  rule: string;
}

export function clauseSatisfied(
  clause: ClausePayload,
  entity: EntityRecord,
  columns: string[],
): boolean {
  // a missing attribute satisfies no literal; an empty body covers everything
  return clause.body.every(
    (lit) => entity.attrs[columns[lit.column]]?.v === lit.predicate,
  );
}

export function previewApply(
  kb: KbDocument,
  ruleset: RulesetPayload,
): PendingInference[] {
  const { attribute, value } = ruleset.target;
  const pending: PendingInference[] = [];
  for (const entity of kb.entities) {
    if (attribute in entity.attrs) continue; // apply never overwrites
    const clause = ruleset.clauses.find((c) =>
      clauseSatisfied(c, entity, ruleset.columns),
    );
    if (clause) {
      pending.push({ entity: entity.id, attribute, value, rule: clause.rendered });
    }
  }
  return pending;
}
