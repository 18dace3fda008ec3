/**
 * View state for one user's screen: the animated preview grid, the peer
 * panel, and the search-space badge. All state of record lives on the
 * server; this is a render model rebuilt from fetches and room events.
 */

import type { EventDto, IndividualDto, Space } from './types.js';
import { TWO_PI, wrapTime } from './snippet.js';

export interface Tile {
  individualId: number;
  genome: string;
  snippet: string;
  selected: boolean;
  error: boolean;
}

export interface ViewState {
  sessionId: string;
  generation: number;
  tiles: Tile[];
  peerPanel: Map<string, IndividualDto[]>;
  spaceBadge: string;
  time: number;
  eventCursor: number;
  /** peers whose samples went stale since the last fetch */
  stalePeers: Set<string>;
}

export function spaceBadgeText(space: Space): string {
  return space.channels.split('').join(',');
}

export function initialView(sessionId: string, space: Space): ViewState {
  return {
    sessionId,
    generation: 0,
    tiles: [],
    peerPanel: new Map(),
    spaceBadge: spaceBadgeText(space),
    time: 0,
    eventCursor: 0,
    stalePeers: new Set(),
  };
}

export function setGrid(
  view: ViewState,
  generation: number,
  individuals: IndividualDto[],
): void {
  view.generation = generation;
  view.tiles = individuals.map((ind) => ({
    individualId: ind.id,
    genome: ind.genome,
    snippet: ind.source,
    selected: false,
    error: false,
  }));
}

export function setPeerSample(
  view: ViewState,
  peerId: string,
  individuals: IndividualDto[],
): void {
  view.peerPanel.set(peerId, individuals);
  view.stalePeers.delete(peerId);
}

export function toggleSelect(view: ViewState, index: number): void {
  const tile = view.tiles[index];
  if (tile) tile.selected = !tile.selected;
}

export function selectedIndices(view: ViewState): number[] {
  return view.tiles.flatMap((tile, i) => (tile.selected ? [i] : []));
}

/** A failed tile fetch shows a badge; the rest of the grid stays usable. */
export function markTileError(view: ViewState, index: number): void {
  const tile = view.tiles[index];
  if (tile) tile.error = true;
}

export function advanceTime(view: ViewState, dt: number): void {
  view.time = wrapTime(view.time + dt);
}

/**
 * Fold one room event into the view. Returns true when the caller should
 * refetch something (its own grid after a generation, a peer sample after
 * a peer stepped, the session after a space expansion).
 */
export function applyEvent(view: ViewState, event: EventDto): boolean {
  if (event.seq > view.eventCursor) view.eventCursor = event.seq;
  switch (event.kind) {
    case 'generation':
      if (event.session !== view.sessionId) {
        view.stalePeers.add(event.session);
      }
      return true;
    case 'space-expanded':
      if (event.session === view.sessionId) {
        const channels = event.payload['channels'];
        if (typeof channels === 'string') {
          view.spaceBadge = channels.split('').join(',');
        }
        return true;
      }
      return false;
    case 'injection':
      return event.session === view.sessionId;
    case 'selection':
      return false;
  }
}

export function gridColumns(view: ViewState): number {
  return Math.max(1, Math.ceil(Math.sqrt(view.tiles.length)));
}

export { TWO_PI };
