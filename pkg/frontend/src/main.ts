// Entry point for the static page. Everything below is thin glue:
// delegated events in, innerHTML out. All state lives in MapBrowser.

import { MapBrowser } from './controller.js';

export function mount(root: HTMLElement, endpoint: string): MapBrowser {
  const browser = new MapBrowser(endpoint, undefined, () => {
    root.innerHTML = browser.view();
  });

  root.addEventListener('click', (event) => {
    const target = event.target as HTMLElement | null;
    if (!target) return;

    const action = target.closest<HTMLElement>('[data-action]');
    if (action) {
      void browser.toolbar(action.dataset.action as never);
      return;
    }
    const ball = target.closest<HTMLElement>('[data-concept]');
    if (ball && ball.dataset.layer !== undefined) {
      void browser.clickBall(ball.dataset.concept ?? '', Number(ball.dataset.layer));
      return;
    }
    const bridge = target.closest<HTMLElement>('[data-bridge-from]');
    if (bridge) {
      void browser.clickBridge(
        bridge.dataset.bridgeFrom ?? '',
        bridge.dataset.bridgeTo ?? '',
      );
      return;
    }
    const tab = target.closest<HTMLElement>('[data-tab]');
    if (tab) {
      browser.activateTab(tab.dataset.tab ?? '');
      return;
    }
    const level = target.closest<HTMLElement>('[data-level-dim]');
    if (level) {
      browser.toggleLevel(
        level.dataset.levelDim ?? '',
        Number(level.dataset.levelCat),
      );
      return;
    }
    const draftRemove = target.closest<HTMLElement>('[data-draft-remove]');
    if (draftRemove) {
      browser.removeDraftLayer(Number(draftRemove.dataset.draftRemove));
      return;
    }
    const dismiss = target.closest<HTMLElement>('[data-dismiss]');
    if (dismiss) {
      browser.dismissNotice(Number(dismiss.dataset.dismiss));
      return;
    }
    if (target.closest('[data-build]')) {
      void browser.buildMap();
    }
  });

  root.addEventListener('input', (event) => {
    const target = event.target as HTMLInputElement | null;
    if (target && target.name === 'query') browser.setQuery(target.value);
  });

  root.innerHTML = browser.view();
  void browser.start();
  return browser;
}

// Auto-mount when the host page provides the anchor div.
if (typeof document !== 'undefined') {
  const anchor = document.getElementById('semcube-app');
  if (anchor) {
    const endpoint =
      anchor.dataset.endpoint ?? `${location.protocol}//${location.hostname}:8080`;
    mount(anchor, endpoint);
  }
}
