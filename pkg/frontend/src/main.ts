/**
 * Minimal browser entry: a grid of snippet previews, pick/step controls,
 * a peer panel with inject buttons, and a space badge. Rendering is plain
 * DOM; the displacement math runs through the snippet evaluator so tiles
 * animate without hitting the server per frame.
 */

import { ApiClient, EventFeed, ServiceError } from './api.js';
import { displaceVertex, parseSnippet } from './snippet.js';
import type { EventDto } from './types.js';
import {
  ViewState,
  advanceTime,
  applyEvent,
  gridColumns,
  initialView,
  markTileError,
  selectedIndices,
  setGrid,
  setPeerSample,
  spaceBadgeText,
  toggleSelect,
} from './view.js';

const FRAME_SECONDS = 1 / 30;

export class App {
  readonly view: ViewState;
  private feed: EventFeed | null = null;

  constructor(
    private readonly client: ApiClient,
    sessionId: string,
    private readonly roomId: string | null,
    space: { channels: string; variables: string },
  ) {
    this.view = initialView(sessionId, space);
  }

  static async connect(client: ApiClient, sessionId: string): Promise<App> {
    const session = await client.getSession(sessionId);
    const app = new App(client, sessionId, session.room, session.space);
    await app.refreshGrid();
    if (session.room) await app.refreshPeers();
    return app;
  }

  async refreshGrid(): Promise<void> {
    const population = await this.client.getPopulation(this.view.sessionId);
    setGrid(this.view, population.generation, population.individuals);
  }

  async refreshPeers(): Promise<void> {
    const peers = await this.client.getPeers(this.view.sessionId);
    for (const [peerId, individuals] of Object.entries(peers)) {
      setPeerSample(this.view, peerId, individuals);
    }
  }

  async pickAndStep(): Promise<void> {
    await this.client.setPicks(this.view.sessionId, selectedIndices(this.view));
    const population = await this.client.step(this.view.sessionId);
    setGrid(this.view, population.generation, population.individuals);
  }

  async injectFromPeer(peerId: string, individualId: number): Promise<void> {
    try {
      const result = await this.client.inject(
        this.view.sessionId,
        peerId,
        individualId,
      );
      this.view.spaceBadge = spaceBadgeText(result.space);
      await this.refreshGrid();
    } catch (error) {
      if (error instanceof ServiceError && error.status === 409) {
        // stale donor: the peer stepped since we sampled; refresh and retry
        await this.refreshPeers();
        this.view.stalePeers.add(peerId);
        return;
      }
      throw error;
    }
  }

  startEventFeed(): void {
    if (!this.roomId || this.feed) return;
    this.feed = new EventFeed(this.client, this.roomId, (event: EventDto) => {
      const needsRefresh = applyEvent(this.view, event);
      if (!needsRefresh) return;
      if (event.session === this.view.sessionId) {
        void this.refreshGrid();
      } else {
        void this.refreshPeers();
      }
    });
    void this.feed.run();
  }

  stop(): void {
    this.feed?.stop();
  }
}

function renderInto(root: HTMLElement, app: App): void {
  root.innerHTML = '';
  const badge = document.createElement('div');
  badge.className = 'space-badge';
  badge.textContent = `search space now modifies ${app.view.spaceBadge}`;
  root.appendChild(badge);

  const grid = document.createElement('div');
  grid.className = 'grid';
  grid.style.gridTemplateColumns = `repeat(${gridColumns(app.view)}, 1fr)`;
  app.view.tiles.forEach((tile, index) => {
    const cell = document.createElement('button');
    cell.className = tile.selected ? 'tile selected' : 'tile';
    if (tile.error) cell.classList.add('error');
    cell.title = tile.snippet;
    cell.textContent = tile.genome.slice(0, 8);
    cell.onclick = () => {
      toggleSelect(app.view, index);
      renderInto(root, app);
    };
    try {
      const parsed = parseSnippet(tile.snippet);
      const [dx] = displaceVertex(parsed, 1, 0, 0, app.view.time);
      cell.dataset.preview = dx.toFixed(3);
    } catch {
      markTileError(app.view, index);
    }
    grid.appendChild(cell);
  });
  root.appendChild(grid);

  const stepButton = document.createElement('button');
  stepButton.textContent = 'step';
  stepButton.onclick = () => {
    void app.pickAndStep().then(() => renderInto(root, app));
  };
  root.appendChild(stepButton);
}

export function mount(root: HTMLElement, app: App): () => void {
  app.startEventFeed();
  const timer = setInterval(() => {
    advanceTime(app.view, FRAME_SECONDS);
    renderInto(root, app);
  }, FRAME_SECONDS * 1000);
  renderInto(root, app);
  return () => {
    clearInterval(timer);
    app.stop();
  };
}

// browser bootstrap; absent under test runners
if (typeof document !== 'undefined' && document.getElementById('evoform-root')) {
  const params = new URLSearchParams(window.location.search);
  const base = params.get('api') ?? '';
  const sessionId = params.get('session');
  if (sessionId) {
    void App.connect(new ApiClient(base), sessionId).then((app) => {
      mount(document.getElementById('evoform-root') as HTMLElement, app);
    });
  }
}
