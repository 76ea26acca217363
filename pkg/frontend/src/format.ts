// Pure presentation helpers: KB table rows, provenance badges, and the
// revision normalization used when comparing saved snapshots.
import type { AttributeCell, KbDocument } from "./types.js";

export const ATTRIBUTES = [
  "category",
  "color",
  "functionality",
  "label",
  "location",
  "owner",
  "restriction",
  "size",
  "weight",
] as const;

export interface KbRow {
  id: string;
  cells: (AttributeCell | null)[];
}

/** Columns actually populated somewhere in the document, canonical order. */
export function activeColumns(kb: KbDocument): string[] {
  return ATTRIBUTES.filter((a) =>
    kb.entities.some((e) => a in e.attrs),
  );
}

export function kbRows(kb: KbDocument, columns: string[]): KbRow[] {
  return kb.entities.map((e) => ({
    id: e.id,
    cells: columns.map((a) => e.attrs[a] ?? null),
  }));
}

export function badgeClass(src: AttributeCell["src"]): string {
  return `badge badge-${src}`;
}

export function formatCell(cell: AttributeCell | null): string {
  if (!cell) return "—";
  const conf = cell.conf < 1 ? ` (${cell.conf.toFixed(2)})` : "";
  return `${cell.v}${conf}`;
}

/**
 * Two snapshot documents describe the same KB state when they are
 * byte-equal after pinning the revision counter, which depends on the
 * number of rejected/overwritten writes along the way, not on content.
 */
export function normalizeRevision(documentText: string): string {
  return documentText.replace(/"revision": \d+/, '"revision": 0');
}
