// The tab strip under the map. One tab per object type present in the
// last retrieval, plus the fixed "Tree" tab that hosts the level picker
// used to configure the next map.

import { escapeXml } from './render.js';
import { LayerSpec, ObjectItem, TreeResponse } from './types.js';

export const TREE_TAB = 'Tree';

export interface TabSet {
  /** TREE_TAB first, then the distinct object types, sorted. */
  titles: string[];
  active: string;
  /** Retrieval result in API order (already ranked by relevance). */
  items: ObjectItem[];
  /** What was clicked to fill the strip, for the header line. */
  caption: string;
}

export function emptyTabs(): TabSet {
  return { titles: [TREE_TAB], active: TREE_TAB, items: [], caption: '' };
}

export function buildTabs(items: ObjectItem[], caption: string): TabSet {
  const types = [...new Set(items.map((item) => item.object_type))].sort();
  const first = types[0];
  return {
    titles: [TREE_TAB, ...types],
    active: first ?? TREE_TAB,
    items,
    caption,
  };
}

export function withActive(tabs: TabSet, title: string): TabSet {
  if (!tabs.titles.includes(title)) return tabs;
  return { ...tabs, active: title };
}

/** Rows for one tab, preserving the order the API returned. */
export function tabItems(tabs: TabSet, title: string): ObjectItem[] {
  return tabs.items.filter((item) => item.object_type === title);
}

function itemRow(item: ObjectItem): string {
  const doc = item.link
    ? `<a href="${escapeXml(item.link)}" target="_blank" rel="noreferrer">` +
      `${escapeXml(item.doc_id)}</a>`
    : escapeXml(item.doc_id);
  return (
    `<li>${doc}` +
    `<span class="score">${item.relevance.toFixed(3)}</span></li>`
  );
}

function treePanel(tree: TreeResponse | null, draft: LayerSpec[]): string {
  if (!tree) return '<p class="hint">levels not loaded yet</p>';
  const picked = new Set(
    draft
      .filter((spec) => spec.category !== undefined)
      .map((spec) => `${spec.dimension}:${spec.category}`),
  );
  const parts: string[] = ['<div class="level-tree">'];
  for (const dim of tree.dimensions) {
    parts.push(`<div class="dim"><span class="dim-name">${escapeXml(dim.name)}</span>`);
    for (const cat of dim.categories) {
      const key = `${dim.id}:${cat.index}`;
      const cls = picked.has(key) ? 'level picked' : 'level';
      const count = cat.concepts.length;
      parts.push(
        `<button type="button" class="${cls}"` +
          ` data-level-dim="${escapeXml(dim.id)}" data-level-cat="${cat.index}">` +
          `level ${cat.index} (${count})</button>`,
      );
    }
    parts.push('</div>');
  }
  parts.push('</div>');
  return parts.join('');
}

export function renderTabs(
  tabs: TabSet,
  tree: TreeResponse | null,
  draft: LayerSpec[],
): string {
  const strip = tabs.titles
    .map((title) => {
      const cls = title === tabs.active ? 'tab active' : 'tab';
      return (
        `<button type="button" class="${cls}" data-tab="${escapeXml(title)}">` +
        `${escapeXml(title)}</button>`
      );
    })
    .join('');

  let panel: string;
  if (tabs.active === TREE_TAB) {
    panel = treePanel(tree, draft);
  } else {
    const rows = tabItems(tabs, tabs.active).map(itemRow).join('');
    const caption = tabs.caption
      ? `<p class="caption">${escapeXml(tabs.caption)}</p>`
      : '';
    panel = `${caption}<ol class="objects">${rows}</ol>`;
  }
  return (
    `<div class="tabs"><nav class="tab-strip">${strip}</nav>` +
    `<div class="tab-panel">${panel}</div></div>`
  );
}
