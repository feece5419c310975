import { describe, expect, it } from "vitest";
import { decadeTicks, esc, fmt, linearTicks, polylinePath } from "../src/svg.js";

describe("fmt", () => {
  it("keeps at most three decimals and strips trailing zeros", () => {
    expect(fmt(1.5)).toBe("1.5");
    expect(fmt(2)).toBe("2");
    expect(fmt(3.14159)).toBe("3.142");
    expect(fmt(10.1)).toBe("10.1");
  });

  it("never emits negative zero", () => {
    expect(fmt(-0.0001)).toBe("0");
    expect(fmt(-0)).toBe("0");
  });

  it("refuses non-finite coordinates", () => {
    expect(() => fmt(Number.NaN)).toThrowError(/non-finite/);
  });
});

describe("linearTicks", () => {
  it("picks 1-2-5 steps covering the range", () => {
    expect(linearTicks(0, 10, 6)).toEqual([0, 2, 4, 6, 8, 10]);
    expect(linearTicks(-12, -5, 7)).toEqual([-12, -11, -10, -9, -8, -7, -6, -5]);
  });

  it("handles a degenerate span", () => {
    expect(linearTicks(3, 3)).toEqual([3]);
  });
});

describe("decadeTicks", () => {
  it("returns decade exponents inside the domain", () => {
    expect(decadeTicks(1e-6, 1e-1)).toEqual([-6, -5, -4, -3, -2, -1]);
    expect(decadeTicks(2e-6, 5e-2)).toEqual([-5, -4, -3, -2]);
  });
});

describe("esc / polylinePath", () => {
  it("escapes markup characters", () => {
    expect(esc('a<b>&"c')).toBe("a&lt;b&gt;&amp;&quot;c");
  });

  it("builds a move-then-line path", () => {
    expect(polylinePath([1, 2.5], [3, 4])).toBe("M1 3 L2.5 4");
  });
});
