/** JSON shapes of the generation API. */

export interface RoomSpec {
  id: string;
  room_type: number;
  position: number;
  size_sqm: number;
  floor_material: number | null;
  floor_colour: number | null;
  wall_material: number | null;
  wall_colour: number | null;
}

export interface HouseSpec {
  rooms: RoomSpec[];
  adjacency: [number, number][];
}

export interface PlanRoom {
  id: string;
  room_type: number;
  area: number;
  [key: string]: unknown;
}

export interface Plan {
  canvas_px: number;
  rooms: PlanRoom[];
  [key: string]: unknown;
}

export interface GenerateResponse {
  house_spec: HouseSpec;
  boxes: number[][];
  plan: Plan;
  plan_svg: string;
  topview_svg: string;
  /** room id -> { floor, wall } as base64 PNG */
  textures: Record<string, { floor: string; wall: string }>;
  obj: string;
  mtl: string;
  seed: number;
  timings: Record<string, number>;
}

export interface VocabResponse {
  room_types: string[];
  positions: string[];
  materials: string[];
  colours: string[];
}

export interface HealthResponse {
  status: string;
  checksums: Record<string, string>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: {
    sentence_index?: number;
    sentence?: string;
    room?: string;
    kind?: string;
    word?: string;
  } | null;
}

/** Error responses carry the HTTP status plus the server's body. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}
