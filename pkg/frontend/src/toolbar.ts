// The tools panel. Two groups: whole-map camera moves, always live, and
// operations on the selected ball, greyed out until something is
// selected.

export type CameraAction =
  | 'rotate-left'
  | 'rotate-right'
  | 'zoom-in'
  | 'zoom-out'
  | 'shift-left'
  | 'shift-right'
  | 'shift-up'
  | 'shift-down';

export type ConceptAction = 'objects' | 'expand' | 'keep-only' | 'delete';

export type ToolbarAction = CameraAction | ConceptAction;

export const CAMERA_ACTIONS: readonly CameraAction[] = [
  'rotate-left',
  'rotate-right',
  'zoom-in',
  'zoom-out',
  'shift-left',
  'shift-right',
  'shift-up',
  'shift-down',
];

export const CONCEPT_ACTIONS: readonly ConceptAction[] = [
  'objects',
  'expand',
  'keep-only',
  'delete',
];

export function isConceptAction(action: ToolbarAction): action is ConceptAction {
  return (CONCEPT_ACTIONS as readonly string[]).includes(action);
}

const LABELS: Record<ToolbarAction, string> = {
  'rotate-left': '⟲ rotate',
  'rotate-right': 'rotate ⟳',
  'zoom-in': 'zoom +',
  'zoom-out': 'zoom −',
  'shift-left': '← shift',
  'shift-right': 'shift →',
  'shift-up': 'shift ↑',
  'shift-down': 'shift ↓',
  objects: 'retrieve objects',
  expand: 'expand',
  'keep-only': 'keep only',
  delete: 'delete',
};

function button(action: ToolbarAction, enabled: boolean): string {
  const disabled = enabled ? '' : ' disabled';
  return (
    `<button type="button" data-action="${action}"${disabled}>` +
    `${LABELS[action]}</button>`
  );
}

export function renderToolbar(hasSelection: boolean): string {
  const map = CAMERA_ACTIONS.map((a) => button(a, true)).join('');
  const concept = CONCEPT_ACTIONS.map((a) => button(a, hasSelection)).join('');
  return (
    `<div class="toolbar">` +
    `<div class="tool-group"><h3>map</h3>${map}</div>` +
    `<div class="tool-group"><h3>concept</h3>${concept}</div>` +
    `</div>`
  );
}
