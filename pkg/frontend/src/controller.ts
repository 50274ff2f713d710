/**
 * Browser state machine.
 *
 * The whole client state is: the last map body the server returned, the
 * camera, the selected ball, the tab strip, the draft configuration and
 * the notice list. Every paint rebuilds the scene from the body with
 * buildScene/renderScene, both pure, so replaying the last server
 * response from scratch always reproduces the visible map. The server
 * stays the single authority; no operation edits the body locally.
 *
 * Mutations (build, expand, keep only, delete) are chained one behind
 * another, so at most one is in flight at a time. Object retrievals are
 * reads and may overlap the chain. Every API failure becomes a
 * dismissible notice, never a silent drop.
 */

import { ApiError, MapServiceClient, Transport } from './api.js';
import {
  Camera,
  DEFAULT_CAMERA,
  rotated,
  shifted,
  zoomed,
} from './camera.js';
import { emptyScene, escapeXml, renderScene } from './render.js';
import { buildScene, Selection } from './scene.js';
import {
  TabSet,
  buildTabs,
  emptyTabs,
  renderTabs,
  withActive,
} from './tabs.js';
import {
  ToolbarAction,
  isConceptAction,
  renderToolbar,
} from './toolbar.js';
import { LayerSpec, MapBody, ObjectItem, TreeResponse } from './types.js';

const YAW_STEP = Math.PI / 12;
const ZOOM_STEP = 1.25;
const PAN_STEP = 48;

export interface Notice {
  id: number;
  message: string;
}

export class MapBrowser {
  private readonly api: MapServiceClient;
  private readonly repaint: () => void;

  private body: MapBody | null = null;
  private camera: Camera = { ...DEFAULT_CAMERA };
  private selection: Selection | null = null;
  private tabs: TabSet = emptyTabs();
  private tree: TreeResponse | null = null;
  private notices: Notice[] = [];
  private noticeSeq = 0;

  private draft: LayerSpec[] = [];
  private queryText = '';

  private chain: Promise<void> = Promise.resolve();

  constructor(endpoint: string, transport?: Transport, onPaint?: () => void) {
    this.api = new MapServiceClient(endpoint, transport);
    this.repaint = onPaint ?? (() => undefined);
  }

  /** Fetch the level tree so the configuration panel has something to show. */
  async start(): Promise<void> {
    try {
      this.tree = await this.api.tree();
    } catch (error) {
      this.pushNotice(error);
    }
    this.repaint();
  }

  // ----- configuration panel -----

  toggleLevel(dimension: string, category: number): void {
    const at = this.draft.findIndex(
      (spec) => spec.dimension === dimension && spec.category === category,
    );
    if (at >= 0) this.draft.splice(at, 1);
    else this.draft.push({ dimension, category });
    this.repaint();
  }

  removeDraftLayer(position: number): void {
    this.draft.splice(position, 1);
    this.repaint();
  }

  setQuery(text: string): void {
    this.queryText = text;
  }

  buildMap(): Promise<void> {
    const layers = this.draft.map((spec) => ({ ...spec }));
    const query = this.queryText.trim();
    if (layers.length === 0) {
      this.pushNotice(new Error('pick at least one level first'));
      this.repaint();
      return Promise.resolve();
    }
    return this.mutate(() =>
      this.api.createMap(query === '' ? { layers } : { layers, query }),
    );
  }

  // ----- toolbar -----

  toolbar(action: ToolbarAction): Promise<void> {
    if (!isConceptAction(action)) {
      this.moveCamera(action);
      this.repaint();
      return Promise.resolve();
    }
    const picked = this.selection;
    if (!picked || !this.body) {
      this.pushNotice(new Error('select a ball first'));
      this.repaint();
      return Promise.resolve();
    }
    const mapId = this.body.map_id;
    switch (action) {
      case 'objects':
        return this.retrieve(
          () => this.api.conceptObjects(mapId, picked.concept),
          picked.concept,
        );
      case 'expand':
        return this.mutate(() =>
          this.api.drillDown(mapId, picked.concept, picked.layer),
        );
      case 'keep-only':
        return this.mutate(() =>
          this.api.keepOnly(mapId, picked.concept, picked.layer),
        );
      case 'delete':
        return this.mutate(() =>
          this.api.remove(mapId, picked.concept, picked.layer),
        );
    }
  }

  private moveCamera(action: ToolbarAction): void {
    switch (action) {
      case 'rotate-left':
        this.camera = rotated(this.camera, -YAW_STEP);
        break;
      case 'rotate-right':
        this.camera = rotated(this.camera, YAW_STEP);
        break;
      case 'zoom-in':
        this.camera = zoomed(this.camera, ZOOM_STEP);
        break;
      case 'zoom-out':
        this.camera = zoomed(this.camera, 1 / ZOOM_STEP);
        break;
      case 'shift-left':
        this.camera = shifted(this.camera, -PAN_STEP, 0);
        break;
      case 'shift-right':
        this.camera = shifted(this.camera, PAN_STEP, 0);
        break;
      case 'shift-up':
        this.camera = shifted(this.camera, 0, -PAN_STEP);
        break;
      case 'shift-down':
        this.camera = shifted(this.camera, 0, PAN_STEP);
        break;
      default:
        break;
    }
  }

  // ----- map clicks -----

  /** Select the ball and pull its ranked objects into the tabs. */
  clickBall(concept: string, layer: number): Promise<void> {
    this.selection = { concept, layer };
    this.repaint();
    if (!this.body) return Promise.resolve();
    const mapId = this.body.map_id;
    return this.retrieve(
      () => this.api.conceptObjects(mapId, concept),
      concept,
    );
  }

  clickBridge(from: string, to: string): Promise<void> {
    if (!this.body) return Promise.resolve();
    const mapId = this.body.map_id;
    return this.retrieve(
      () => this.api.bridgeObjects(mapId, from, to),
      `${from} × ${to}`,
    );
  }

  activateTab(title: string): void {
    this.tabs = withActive(this.tabs, title);
    this.repaint();
  }

  dismissNotice(id: number): void {
    this.notices = this.notices.filter((notice) => notice.id !== id);
    this.repaint();
  }

  // ----- plumbing -----

  /** Queue a map mutation; the next one starts only after this one lands. */
  private mutate(run: () => Promise<MapBody>): Promise<void> {
    const step = this.chain.then(async () => {
      try {
        const next = await run();
        this.body = next;
        this.afterBody();
      } catch (error) {
        this.pushNotice(error);
      }
      this.repaint();
    });
    this.chain = step;
    return step;
  }

  private retrieve(
    run: () => Promise<{ items: ObjectItem[] }>,
    caption: string,
  ): Promise<void> {
    return run()
      .then((listing) => {
        this.tabs = buildTabs(listing.items, caption);
      })
      .catch((error) => {
        this.pushNotice(error);
      })
      .then(() => this.repaint());
  }

  /** Drop the selection when its ball is no longer on the map. */
  private afterBody(): void {
    if (!this.body || !this.selection) return;
    const layer = this.body.layers[this.selection.layer];
    const still =
      layer !== undefined &&
      layer.balls.some((ball) => ball.concept === this.selection?.concept);
    if (!still) this.selection = null;
  }

  private pushNotice(error: unknown): void {
    const message =
      error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : error instanceof Error
          ? error.message
          : String(error);
    this.notices.push({ id: ++this.noticeSeq, message });
  }

  // ----- views -----

  mapBody(): MapBody | null {
    return this.body;
  }

  cameraState(): Camera {
    return { ...this.camera };
  }

  selectionState(): Selection | null {
    return this.selection ? { ...this.selection } : null;
  }

  noticeList(): readonly Notice[] {
    return this.notices;
  }

  tabState(): TabSet {
    return this.tabs;
  }

  /** The map pane. Always a fresh render of the last server body. */
  sceneSvg(): string {
    if (!this.body) return emptyScene('configure layers and build a map');
    return renderScene(buildScene(this.body, this.camera, this.selection));
  }

  view(): string {
    const draftRows = this.draft
      .map(
        (spec, i) =>
          `<li>${escapeXml(spec.dimension)} · level ${spec.category}` +
          `<button type="button" data-draft-remove="${i}">✕</button></li>`,
      )
      .join('');
    const canBuild = this.draft.length > 0 ? '' : ' disabled';
    const noticeRows = this.notices
      .map(
        (notice) =>
          `<div class="notice">${escapeXml(notice.message)}` +
          `<button type="button" data-dismiss="${notice.id}">dismiss</button></div>`,
      )
      .join('');
    const header = this.body
      ? `<div class="map-head">map ${escapeXml(this.body.map_id)}` +
        ` · ${escapeXml(this.body.measure)} δ=${this.body.delta}` +
        ` · ${escapeXml(this.body.scorer)}` +
        (this.body.query.length
          ? ` · query: ${escapeXml(this.body.query.join(' '))}`
          : '') +
        `</div>`
      : '';
    return (
      `<div class="browser">` +
      `<aside class="panel">` +
      `<h1>concept map browser</h1>` +
      `<section class="config">` +
      `<h3>layers</h3><ul class="draft">${draftRows}</ul>` +
      `<input type="text" name="query" placeholder="free text query"` +
      ` value="${escapeXml(this.queryText)}"/>` +
      `<button type="button" class="build" data-build${canBuild}>build map</button>` +
      `</section>` +
      renderToolbar(this.selection !== null) +
      `<div class="notices">${noticeRows}</div>` +
      `</aside>` +
      `<main class="stage">` +
      header +
      this.sceneSvg() +
      renderTabs(this.tabs, this.tree, this.draft) +
      `</main>` +
      `</div>`
    );
  }
}
