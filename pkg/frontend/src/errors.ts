/** Error categories mirroring the bioparse CLI exit codes. */
export type ErrorCategory = "usage" | "format" | "domain" | "internal";

/** Base error carrying the category reported by the core toolkit. */
export class BioparseError extends Error {
  readonly category: ErrorCategory;

  constructor(category: ErrorCategory, message: string) {
    super(message);
    this.name = new.target.name;
    this.category = category;
  }
}

/** Bad invocation or inconsistent arguments (exit code 1). */
export class UsageError extends BioparseError {
  constructor(message: string) {
    super("usage", message);
  }
}

/** Malformed input file or text (exit code 2). */
export class FormatError extends BioparseError {
  constructor(message: string) {
    super("format", message);
  }
}

/** Well-formed input describing an impossible request (exit code 3). */
export class DomainError extends BioparseError {
  constructor(message: string) {
    super("domain", message);
  }
}

/** Map a nonzero CLI exit code and its stderr text to a host exception. */
export function errorFromExit(code: number, stderr: string): BioparseError {
  const message = stderr.trim().replace(/^error:\s*/, "") ||
    `bioparse exited with code ${code}`;
  switch (code) {
    case 1:
      return new UsageError(message);
    case 2:
      return new FormatError(message);
    case 3:
      return new DomainError(message);
    default:
      return new BioparseError("internal", message);
  }
}
