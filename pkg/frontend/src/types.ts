// Wire types mirroring the service JSON bodies.

export type Channel = "face" | "text" | "audio";

export type Category =
  | "anger"
  | "contempt"
  | "disgust"
  | "fear"
  | "happiness"
  | "neutral"
  | "sadness"
  | "surprise";

export const CATEGORIES: Category[] = [
  "anger", "contempt", "disgust", "fear",
  "happiness", "neutral", "sadness", "surprise",
];

export interface EmotionPick {
  category: Category;
  confidence: number;
}

export interface BarcodeRun {
  start: number;
  end: number;
  category: Category | null;
}

export interface VideoSummary {
  videoId: string;
  title: string;
  category: string;
  duration: number;
  metrics: {
    coherenceScore: number | null;
    diversity: number;
    percentage: Record<Channel, Record<string, number>>;
  };
  coherenceLine: { segmentId: number; degree: number | null }[];
  barcode: Record<Channel, BarcodeRun[]>;
}

export interface SankeyNodeBody {
  category: Category;
  totalDuration: number;
  sentenceIds: number[];
}

export interface SankeyLinkBody {
  from: Category;
  to: Category;
  totalDuration: number;
  sentenceIds: number[];
}

export interface TreemapCellBody {
  link: { from: Category; to: Category };
  faceCount: number;
  representative: { frameIndex: number; timestamp: number };
}

export interface HistogramBody {
  feature: string;
  edges: number[];
  counts: number[];
  empty: boolean;
}

export interface SankeyModelBody {
  videoId: string;
  nodes: Record<Channel, SankeyNodeBody[]>;
  links: { faceText: SankeyLinkBody[]; textAudio: SankeyLinkBody[] };
  treemaps: Record<string, TreemapCellBody[]>;
  terms: Record<string, { term: string; weight: number }[]>;
  histograms: Record<string, Record<string, HistogramBody>> | null;
  residuals: number[];
}

export interface GlyphSectorBody {
  category: Category | null;
  radius: number;
}

export interface ProjectionPointBody {
  segmentId: number;
  x: number;
  y: number;
  glyph: {
    face: GlyphSectorBody;
    text: GlyphSectorBody;
    audio: GlyphSectorBody;
    timeIndex: number;
  };
}

export interface ProjectionBody {
  videoId: string;
  params: {
    mode: string;
    perplexity: number;
    iterations: number;
    seed: number;
    learningRate: number;
  };
  points: ProjectionPointBody[];
}

export interface TransitionBody {
  time: number;
  before: Category;
  after: Category;
  wordIndex: number | null;
}

export interface FusionBody {
  segmentId: number;
  span: { start: number; end: number };
  face: EmotionPick | null;
  text: EmotionPick | null;
  audio: EmotionPick | null;
  coherence: number | null;
  transitions: TransitionBody[];
  framesInSpan: number;
  detectedFrames: number;
}

export interface SegmentBody {
  id: number;
  start: number;
  end: number;
  text: string;
  words: { w: string; start: number; end: number }[];
  textEmotion: Record<string, number>;
  audioEmotion: Record<string, number>;
}

export interface ProsodySeriesBody {
  feature: string;
  hop: number;
  samples: { t: number; value: number | null; voiced?: boolean; linear?: number }[];
}

export interface SentenceBody {
  videoId: string;
  segment: SegmentBody;
  fusion: FusionBody;
  context: { segment: SegmentBody; fusion: FusionBody }[];
  prosody: Record<string, ProsodySeriesBody> | null;
  confidence: {
    face: { t: number; value: number }[];
    text: { segmentId: number; value: number | null }[];
    audio: { segmentId: number; value: number | null }[];
  };
}

export interface WordStatBody {
  word: string;
  frequency: number;
  totalDuration: number;
  faceDurations: Record<string, number>;
  undetectedDuration: number;
  occurrences: { segmentId: number; start: number; end: number }[];
}

export interface WordsBody {
  videoId: string;
  words: WordStatBody[];
}

export interface SelectionResponse {
  videoId: string;
  sentenceIds: number[];
}
