import { describe, expect, it, vi } from "vitest";
import { debounce, PREVIEW_DEBOUNCE_MS } from "../src/debounce.js";

describe("debounce", () => {
  it("collapses rapid calls into the trailing one", () => {
    vi.useFakeTimers();
    const calls: number[] = [];
    const fn = debounce((v: number) => calls.push(v), 300);
    fn(1);
    fn(2);
    fn(3);
    vi.advanceTimersByTime(299);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(1);
    expect(calls).toEqual([3]);
    vi.useRealTimers();
  });

  it("re-arms after firing", () => {
    vi.useFakeTimers();
    const calls: number[] = [];
    const fn = debounce((v: number) => calls.push(v), 300);
    fn(1);
    vi.advanceTimersByTime(300);
    fn(2);
    vi.advanceTimersByTime(300);
    expect(calls).toEqual([1, 2]);
    vi.useRealTimers();
  });

  it("cancel drops the pending call", () => {
    vi.useFakeTimers();
    const calls: number[] = [];
    const fn = debounce((v: number) => calls.push(v), 300);
    fn(1);
    fn.cancel();
    vi.advanceTimersByTime(1000);
    expect(calls).toEqual([]);
    vi.useRealTimers();
  });

  it("flush fires immediately", () => {
    vi.useFakeTimers();
    const calls: number[] = [];
    const fn = debounce((v: number) => calls.push(v), 300);
    fn(9);
    fn.flush();
    expect(calls).toEqual([9]);
    vi.useRealTimers();
  });

  it("uses the 300 ms contract for previews", () => {
    expect(PREVIEW_DEBOUNCE_MS).toBe(300);
  });
});
