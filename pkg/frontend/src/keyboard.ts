/**
 * Keyboard shortcuts: a = accept, r = reject, enter = commit,
 * arrows / j / k move the row selection. Keystrokes typed into form
 * fields are left alone.
 */

export interface KeyHandlers {
  accept(): void;
  reject(): void;
  commit(): void;
  move(delta: number): void;
}

function inFormField(event: KeyboardEvent): boolean {
  const el = event.target;
  return (
    el instanceof HTMLElement &&
    (el.tagName === "INPUT" ||
      el.tagName === "TEXTAREA" ||
      el.tagName === "SELECT" ||
      el.isContentEditable)
  );
}

/** Attach the shortcut map to a target; returns the detach function. */
export function bindKeys(
  target: EventTarget,
  handlers: KeyHandlers,
): () => void {
  const onKeyDown = (event: Event): void => {
    const key = event as KeyboardEvent;
    if (key.ctrlKey || key.metaKey || key.altKey || inFormField(key)) return;
    switch (key.key) {
      case "a":
        handlers.accept();
        break;
      case "r":
        handlers.reject();
        break;
      case "Enter":
        handlers.commit();
        break;
      case "ArrowDown":
      case "j":
        handlers.move(1);
        break;
      case "ArrowUp":
      case "k":
        handlers.move(-1);
        break;
      default:
        return;
    }
    key.preventDefault();
  };
  target.addEventListener("keydown", onKeyDown);
  return () => target.removeEventListener("keydown", onKeyDown);
}
