import type {
  EventDto,
  PopulationDto,
  RoomDto,
  SessionDto,
  Space,
} from './types.js';

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let code = 'unknown';
  let message = response.statusText;
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ServiceError(response.status, code, message);
}

/** Thin typed wrapper over the service's HTTP API. */
export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(this.baseUrl + path);
    await raiseForStatus(response);
    return response.json() as Promise<T>;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T | null> {
    const response = await fetch(this.baseUrl + path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
    await raiseForStatus(response);
    if (response.status === 204) return null;
    return response.json() as Promise<T>;
  }

  createRoom(members: { name: string; space: Space }[]): Promise<RoomDto> {
    return this.postJson<RoomDto>('/rooms', { members }) as Promise<RoomDto>;
  }

  getSession(sessionId: string): Promise<SessionDto> {
    return this.getJson(`/sessions/${sessionId}`);
  }

  getPopulation(sessionId: string): Promise<PopulationDto> {
    return this.getJson(`/sessions/${sessionId}/population`);
  }

  async setPicks(sessionId: string, indices: number[]): Promise<void> {
    await this.postJson(`/sessions/${sessionId}/picks`, { indices });
  }

  step(sessionId: string): Promise<PopulationDto> {
    return this.postJson<PopulationDto>(
      `/sessions/${sessionId}/step`,
      {},
    ) as Promise<PopulationDto>;
  }

  async getPeers(
    sessionId: string,
  ): Promise<Record<string, PopulationDto['individuals']>> {
    const body = await this.getJson<{
      peers: Record<string, PopulationDto['individuals']>;
    }>(`/sessions/${sessionId}/peers`);
    return body.peers;
  }

  inject(
    sessionId: string,
    donorSession: string,
    individualId: number,
  ): Promise<{ space: Space }> {
    return this.postJson<{ space: Space }>(`/sessions/${sessionId}/inject`, {
      donor_session: donorSession,
      individual_id: individualId,
    }) as Promise<{ space: Space }>;
  }

  async getShader(sessionId: string, individualId: number): Promise<string> {
    const response = await fetch(
      `${this.baseUrl}/sessions/${sessionId}/individuals/${individualId}/shader`,
    );
    await raiseForStatus(response);
    return response.text();
  }

  async getDisplacedMesh(
    sessionId: string,
    individualId: number,
    t: number,
  ): Promise<string> {
    const response = await fetch(
      `${this.baseUrl}/sessions/${sessionId}/individuals/${individualId}/mesh?t=${t}`,
    );
    await raiseForStatus(response);
    return response.text();
  }

  async getEvents(
    roomId: string,
    since = 0,
    wait = 0,
  ): Promise<EventDto[]> {
    const body = await this.getJson<{ events: EventDto[] }>(
      `/rooms/${roomId}/events?since=${since}&wait=${wait}`,
    );
    return body.events;
  }
}

/**
 * Long-poll loop over the room event feed. Resolves ordering and cursor
 * tracking so callers just receive events once each, in sequence.
 */
export class EventFeed {
  private cursor = 0;
  private stopped = false;

  constructor(
    private readonly client: ApiClient,
    private readonly roomId: string,
    private readonly onEvent: (event: EventDto) => void,
    private readonly waitSeconds = 20,
  ) {}

  async poll(): Promise<number> {
    const events = await this.client.getEvents(
      this.roomId,
      this.cursor,
      this.waitSeconds,
    );
    for (const event of events) {
      if (event.seq > this.cursor) this.cursor = event.seq;
      this.onEvent(event);
    }
    return events.length;
  }

  async run(): Promise<void> {
    while (!this.stopped) {
      try {
        await this.poll();
      } catch {
        // transient fetch failure; back off briefly and retry
        await new Promise((resolve) => setTimeout(resolve, 1000));
      }
    }
  }

  stop(): void {
    this.stopped = true;
  }
}
