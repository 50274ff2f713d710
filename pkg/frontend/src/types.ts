// Wire types for the map service. Field names match the JSON exactly;
// everything here comes off the server and is treated as read-only.

export type BallState = 'normal' | 'expanded-child' | 'query-match';

export interface BallBody {
  concept: string;
  label: string;
  relevance: number;
  state: BallState;
}

export interface LayerBody {
  dimension: string;
  /** "category:N" for level-defined layers, "query:words" otherwise. */
  source: string;
  balls: BallBody[];
}

export interface BridgeItem {
  from: string;
  to: string;
  score: number;
}

export interface BridgeGroup {
  layer_pair: [number, number];
  items: BridgeItem[];
}

export interface MapBody {
  map_id: string;
  measure: string;
  delta: number;
  scorer: string;
  contingency: string;
  query: string[];
  layers: LayerBody[];
  bridges: BridgeGroup[];
}

export interface TreeConcept {
  id: string;
  label: string;
}

export interface TreeCategory {
  index: number;
  concepts: TreeConcept[];
}

export interface TreeDimension {
  id: string;
  name: string;
  categories: TreeCategory[];
}

export interface TreeResponse {
  dimensions: TreeDimension[];
}

export interface ObjectItem {
  doc_id: string;
  object_type: string;
  relevance: number;
  link?: string;
}

export interface ObjectList {
  items: ObjectItem[];
}

export interface LayerSpec {
  dimension: string;
  category?: number;
  query?: string;
}

export interface MapRequest {
  layers: LayerSpec[];
  query?: string;
  measure?: string;
  delta?: number;
  scorer?: string;
  contingency?: string;
}

export interface ErrorBody {
  error: {
    code: string;
    message: string;
    context: Record<string, unknown>;
  };
}
