// Scene to SVG markup. Plain string building, no DOM types, so the
// exact same render runs in the page and in the test runner.

import { Scene, SceneBall, SceneBridge, ScenePlane } from './scene.js';

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&apos;');
}

function planeMarkup(plane: ScenePlane): string {
  const label = escapeXml(`${plane.dimension} (${plane.source})`);
  return (
    `<polygon points="${plane.points}" fill="#eef2f7" fill-opacity="0.85"` +
    ` stroke="#cbd5e1" stroke-width="1"/>` +
    `<text x="${plane.labelX}" y="${plane.labelY}"` +
    ` font-size="${plane.fontSize}" fill="#475569">${label}</text>`
  );
}

function bridgeMarkup(bridge: SceneBridge): string {
  return (
    `<line x1="${bridge.x1}" y1="${bridge.y1}"` +
    ` x2="${bridge.x2}" y2="${bridge.y2}"` +
    ` stroke="#334155" stroke-width="${bridge.width}"` +
    ` stroke-opacity="${bridge.opacity}"` +
    ` data-bridge-from="${escapeXml(bridge.from)}"` +
    ` data-bridge-to="${escapeXml(bridge.to)}"/>`
  );
}

function ballMarkup(ball: SceneBall): string {
  const concept = escapeXml(ball.concept);
  let markup =
    `<circle cx="${ball.x}" cy="${ball.y}" r="${ball.r}"` +
    ` fill="${ball.fill}" stroke="${ball.stroke}" stroke-width="1.5"` +
    ` data-concept="${concept}" data-layer="${ball.layer}"` +
    ` data-state="${ball.state}"/>`;
  if (ball.selected) {
    markup +=
      `<circle cx="${ball.x}" cy="${ball.y}" r="${ball.r + 4}"` +
      ` fill="none" stroke="#f59e0b" stroke-width="2.5"/>`;
  }
  markup +=
    `<text x="${ball.x}" y="${ball.y + ball.r + ball.fontSize}"` +
    ` font-size="${ball.fontSize}" text-anchor="middle"` +
    ` fill="#1e293b">${escapeXml(ball.label)}</text>`;
  return markup;
}

export function renderScene(scene: Scene): string {
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg"` +
      ` viewBox="0 0 ${scene.width} ${scene.height}"` +
      ` width="${scene.width}" height="${scene.height}" class="map-scene">`,
  ];
  for (const element of scene.elements) {
    if (element.kind === 'plane') parts.push(planeMarkup(element));
    else if (element.kind === 'bridge') parts.push(bridgeMarkup(element));
    else parts.push(ballMarkup(element));
  }
  parts.push('</svg>');
  return parts.join('');
}

export function emptyScene(message: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 960 640"` +
    ` width="960" height="640" class="map-scene">` +
    `<text x="480" y="320" text-anchor="middle" font-size="15"` +
    ` fill="#64748b">${escapeXml(message)}</text></svg>`
  );
}
