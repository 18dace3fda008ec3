export interface Space {
  channels: string;
  variables: string;
}

export interface Provenance {
  kind: 'native' | 'injected';
  origin: string | null;
  bias_remaining: number;
}

export interface IndividualDto {
  id: number;
  genome: string;
  depth: number;
  fitness: number;
  provenance: Provenance;
  source: string;
}

export interface PopulationDto {
  generation: number;
  individuals: IndividualDto[];
}

export interface SessionDto {
  id: string;
  owner: string;
  room: string | null;
  mesh: string;
  generation: number;
  space: Space;
  params: Record<string, number>;
}

export interface RoomDto {
  room: string;
  sessions: { id: string; name: string }[];
}

export interface EventDto {
  seq: number;
  room: string;
  session: string;
  kind: 'selection' | 'generation' | 'injection' | 'space-expanded';
  payload: Record<string, unknown>;
}

export interface ApiError {
  code: string;
  message: string;
}
