// Trailing-edge debounce with latest-wins semantics: rapid config edits
// collapse into one preview request 300 ms after the last change.

export const PREVIEW_DEBOUNCE_MS = 300;

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
  flush(): void;
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
  timers: { set: typeof setTimeout; clear: typeof clearTimeout } = {
    set: setTimeout,
    clear: clearTimeout,
  },
): Debounced<A> {
  let handle: ReturnType<typeof setTimeout> | null = null;
  let pending: A | null = null;

  const invoke = () => {
    handle = null;
    if (pending !== null) {
      const args = pending;
      pending = null;
      fn(...args);
    }
  };

  const debounced = ((...args: A) => {
    pending = args;
    if (handle !== null) timers.clear(handle);
    handle = timers.set(invoke, waitMs);
  }) as Debounced<A>;

  debounced.cancel = () => {
    if (handle !== null) timers.clear(handle);
    handle = null;
    pending = null;
  };

  debounced.flush = () => {
    if (handle !== null) timers.clear(handle);
    invoke();
  };

  return debounced;
}
