"""Command-line entry point: embed-export export ..."""

import argparse
import sys

from .errors import ExportError
from .export import DEFAULT_MAX_LENGTH, ExportRequest, export


def read_prompts_file(path: str):
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as err:
        raise ValueError(f"cannot read prompts file {path}: {err}") from err
    prompts = [line.strip() for line in lines if line.strip()]
    if not prompts:
        raise ValueError(f"prompts file {path} contains no prompts")
    return prompts


def build_parser():
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="Export padded text-encoder embeddings as NPY + manifest pairs",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export", help="encode every prompt in a file")
    p.add_argument("prompts_file", help="text file, one prompt per line")
    p.add_argument("--encoder", required=True, help="encoder id or local path")
    p.add_argument("--max-length", type=int, default=DEFAULT_MAX_LENGTH)
    p.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        prompts = read_prompts_file(args.prompts_file)
        req = ExportRequest(
            prompts=tuple(prompts),
            encoder_id=args.encoder,
            max_length=args.max_length,
            out_dir=args.out,
        )
        records = export(req)
    except (ExportError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    first = records[0]
    print(
        f"exported={len(records)} n={first.n} d={first.d} out_dir={args.out}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
