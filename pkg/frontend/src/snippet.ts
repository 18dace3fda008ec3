/**
 * Parser and evaluator for the one-line displacement snippets the service
 * emits, e.g. `p.xy = p.xy + ((p.x * 0.5098) + sin(p.y));`.
 *
 * Running the snippet client-side gives smooth tile animation without
 * polling the displaced-mesh endpoint every frame. The arithmetic matches
 * the server exactly: division by a near-zero denominator returns the
 * numerator, tan is limited to +/-1e4, and every parenthesized group is
 * limited to +/-1e6.
 */

export const TWO_PI = 2 * Math.PI;
const DIV_EPSILON = 1e-6;
const TAN_LIMIT = 1e4;
const GROUP_LIMIT = 1e6;

export type SnippetFn = (x: number, y: number, z: number, t: number) => number;

export interface ParsedSnippet {
  swizzle: string;
  evaluate: SnippetFn;
}

/** Wrap a time value into [0, 2pi), matching the server's convention. */
export function wrapTime(t: number): number {
  let r = t % TWO_PI;
  if (r < 0) r += TWO_PI;
  return r;
}

const clampGroup = (v: number): number =>
  Math.min(Math.max(v, -GROUP_LIMIT), GROUP_LIMIT);

const UNARY: Record<string, (v: number) => number> = {
  sin: Math.sin,
  cos: Math.cos,
  tan: (v) => Math.min(Math.max(Math.tan(v), -TAN_LIMIT), TAN_LIMIT),
};

class Parser {
  private pos = 0;

  constructor(private readonly text: string) {}

  private skipSpace(): void {
    while (this.pos < this.text.length && this.text[this.pos] === ' ') this.pos++;
  }

  private expect(token: string): void {
    this.skipSpace();
    if (!this.text.startsWith(token, this.pos)) {
      throw new Error(`expected ${JSON.stringify(token)} at ${this.pos}`);
    }
    this.pos += token.length;
  }

  private peek(): string {
    this.skipSpace();
    return this.text[this.pos] ?? '';
  }

  parseStatement(): ParsedSnippet {
    this.expect('p.');
    const start = this.pos;
    while (/[xyz]/.test(this.text[this.pos] ?? '')) this.pos++;
    const swizzle = this.text.slice(start, this.pos);
    if (!swizzle) throw new Error('empty swizzle');
    this.expect('=');
    this.expect(`p.${swizzle}`);
    this.expect('+');
    this.expect('(');
    const body = this.parseExpr();
    this.expect(')');
    this.expect(';');
    this.skipSpace();
    if (this.pos !== this.text.trimEnd().length) {
      throw new Error(`trailing input at ${this.pos}`);
    }
    const evaluate: SnippetFn = (x, y, z, t) => clampGroup(body(x, y, z, t));
    return { swizzle, evaluate };
  }

  private parseExpr(): SnippetFn {
    const ch = this.peek();
    if (ch === '(') {
      this.expect('(');
      const left = this.parseExpr();
      this.skipSpace();
      const op = this.text[this.pos];
      if (!'+-*/'.includes(op)) throw new Error(`bad operator at ${this.pos}`);
      this.pos++;
      const right = this.parseExpr();
      this.expect(')');
      return this.combine(left, op, right);
    }
    if (ch === 'p') {
      this.expect('p.');
      const name = this.text[this.pos];
      if (!'xyz'.includes(name)) throw new Error(`bad variable at ${this.pos}`);
      this.pos++;
      return name === 'x' ? (x) => x : name === 'y' ? (_x, y) => y : (_x, _y, z) => z;
    }
    if (ch === 't' && this.text.startsWith('time', this.pos)) {
      this.expect('time');
      return (_x, _y, _z, t) => t;
    }
    if (/[a-z]/.test(ch)) {
      const name = this.text.slice(this.pos, this.pos + 3);
      const fn = UNARY[name];
      if (!fn) throw new Error(`unknown function at ${this.pos}`);
      this.pos += 3;
      this.expect('(');
      const inner = this.parseExpr();
      this.expect(')');
      return (x, y, z, t) => fn(inner(x, y, z, t));
    }
    return this.parseNumber();
  }

  private parseNumber(): SnippetFn {
    this.skipSpace();
    const match = /^-?\d+\.\d+/.exec(this.text.slice(this.pos));
    if (!match) throw new Error(`expected a number at ${this.pos}`);
    this.pos += match[0].length;
    const value = Number(match[0]);
    return () => value;
  }

  private combine(left: SnippetFn, op: string, right: SnippetFn): SnippetFn {
    switch (op) {
      case '+':
        return (x, y, z, t) => clampGroup(left(x, y, z, t) + right(x, y, z, t));
      case '-':
        return (x, y, z, t) => clampGroup(left(x, y, z, t) - right(x, y, z, t));
      case '*':
        return (x, y, z, t) => clampGroup(left(x, y, z, t) * right(x, y, z, t));
      default:
        return (x, y, z, t) => {
          const numerator = left(x, y, z, t);
          const denominator = right(x, y, z, t);
          if (Math.abs(denominator) < DIV_EPSILON) return clampGroup(numerator);
          return clampGroup(numerator / denominator);
        };
    }
  }
}

export function parseSnippet(text: string): ParsedSnippet {
  return new Parser(text.trim()).parseStatement();
}

/** Apply a parsed snippet to one vertex, returning the displaced position. */
export function displaceVertex(
  snippet: ParsedSnippet,
  x: number,
  y: number,
  z: number,
  t: number,
): [number, number, number] {
  const wrapped = wrapTime(t);
  const e = snippet.evaluate(x, y, z, wrapped);
  return [
    snippet.swizzle.includes('x') ? x + e : x,
    snippet.swizzle.includes('y') ? y + e : y,
    snippet.swizzle.includes('z') ? z + e : z,
  ];
}
