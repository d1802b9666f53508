/**
 * Raw-preserving JSON number index.
 *
 * JSON.parse loses the original number spelling ("1.0" becomes 1, "1e-05"
 * becomes 0.00001), but the workbench must display score numbers byte-equal
 * to the API response. This scanner walks the JSON text once and records the
 * raw literal for every number, keyed by its path ("a.b.0.c").
 */

export type RawIndex = Map<string, string>;

class Scanner {
  private pos = 0;

  constructor(private readonly text: string, private readonly out: RawIndex) {}

  scan(): void {
    this.skipWs();
    this.value("");
  }

  private peek(): string {
    return this.text[this.pos];
  }

  private skipWs(): void {
    while (this.pos < this.text.length && " \t\r\n".includes(this.text[this.pos])) {
      this.pos += 1;
    }
  }

  private value(path: string): void {
    const ch = this.peek();
    if (ch === "{") {
      this.object(path);
    } else if (ch === "[") {
      this.array(path);
    } else if (ch === '"') {
      this.string();
    } else if (ch === "t" || ch === "f" || ch === "n") {
      this.literal();
    } else {
      this.number(path);
    }
  }

  private object(path: string): void {
    this.pos += 1; // {
    this.skipWs();
    if (this.peek() === "}") {
      this.pos += 1;
      return;
    }
    for (;;) {
      this.skipWs();
      const key = this.string();
      this.skipWs();
      this.pos += 1; // :
      this.skipWs();
      this.value(path ? `${path}.${key}` : key);
      this.skipWs();
      if (this.peek() === ",") {
        this.pos += 1;
        continue;
      }
      this.pos += 1; // }
      return;
    }
  }

  private array(path: string): void {
    this.pos += 1; // [
    this.skipWs();
    if (this.peek() === "]") {
      this.pos += 1;
      return;
    }
    let index = 0;
    for (;;) {
      this.skipWs();
      this.value(path ? `${path}.${index}` : String(index));
      index += 1;
      this.skipWs();
      if (this.peek() === ",") {
        this.pos += 1;
        continue;
      }
      this.pos += 1; // ]
      return;
    }
  }

  private string(): string {
    // assumes this.peek() === '"'
    const start = this.pos;
    this.pos += 1;
    while (this.pos < this.text.length) {
      const ch = this.text[this.pos];
      if (ch === "\\") {
        this.pos += 2;
        continue;
      }
      if (ch === '"') {
        this.pos += 1;
        return JSON.parse(this.text.slice(start, this.pos)) as string;
      }
      this.pos += 1;
    }
    throw new Error("unterminated string in JSON payload");
  }

  private literal(): void {
    while (this.pos < this.text.length && /[a-z]/.test(this.text[this.pos])) {
      this.pos += 1;
    }
  }

  private number(path: string): void {
    const start = this.pos;
    while (
      this.pos < this.text.length &&
      /[0-9eE+\-.]/.test(this.text[this.pos])
    ) {
      this.pos += 1;
    }
    this.out.set(path, this.text.slice(start, this.pos));
  }
}

/** Index every number literal in a JSON document by its path. */
export function rawNumberIndex(text: string): RawIndex {
  const out: RawIndex = new Map();
  new Scanner(text, out).scan();
  return out;
}

/** Parse a response body and keep the raw number spellings alongside. */
export function parseWithRaw<T>(text: string): { data: T; raw: RawIndex } {
  return { data: JSON.parse(text) as T, raw: rawNumberIndex(text) };
}

/** Raw literal at a path, falling back to the parsed value's default string. */
export function rawAt(raw: RawIndex, path: string, fallback: number): string {
  return raw.get(path) ?? String(fallback);
}
