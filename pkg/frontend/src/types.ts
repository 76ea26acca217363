// Payload shapes of the session service API.

export interface AttributeCell {
  v: string;
  src: "vision" | "dialog" | "inferred";
  conf: number;
  rule?: string;
}

export interface EntityRecord {
  id: string;
  attrs: Record<string, AttributeCell>;
}

export interface KbDocument {
  revision: number;
  entities: EntityRecord[];
}

export interface BodyLiteral {
  predicate: string;
  column: number;
}

export interface ClausePayload {
  body: BodyLiteral[];
  rendered: string;
  stats: { tp: number; fp: number; m_estimate: number };
}

export interface RulesetPayload {
  target: { attribute: string; value: string };
  columns: string[];
  clauses: ClausePayload[];
  rendered: string;
}

export interface UtteranceResponse {
  reply: string;
  effect: Record<string, unknown> & { act: string };
  revision: number;
}

export interface SceneResponse {
  entities: string[];
  revision: number;
}

export interface ApplyRecord {
  entity: string;
  attribute: string;
  value: string;
  rule: string;
  revision: number;
}

export interface ApplyResponse {
  records: ApplyRecord[];
  revision: number;
}

export interface SceneDetection {
  box: [number, number, number, number];
  candidates: { cat: string; conf: number }[];
  hsv: [number, number, number];
}

export interface SceneFramePayload {
  image_id: string;
  detections: SceneDetection[];
}
