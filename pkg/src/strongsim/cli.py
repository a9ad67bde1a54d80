"""Command-line interface.

Exit codes: 0 success, 2 argument or file-format error, 3 numeric validation
failure (for instance a matrix that is not unitary).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import Counter

from . import __version__
from .bench import bench_full, bench_single_output
from .engine import Threshold, slos_full, slos_gen, slos_hybrid, sample
from .estimate import estimate
from .fock import FockState, MaskSet, StateNotFoundError, build_layer_structures
from .serialize import FormatError, read_structures, write_structures
from .unitary import NotUnitaryError, as_unitary, haar_random_unitary, load_unitary, save_unitary

EXIT_USAGE = 2
EXIT_NUMERIC = 3


class _Emitter:
    def __init__(self, fmt: str, fields: list[str], stream=None):
        self.fmt = fmt
        self.fields = fields
        self.stream = stream or sys.stdout
        if fmt == "csv":
            self.writer = csv.DictWriter(self.stream, fieldnames=fields)
            self.writer.writeheader()

    def emit(self, record: dict) -> None:
        if self.fmt == "csv":
            row = {k: ",".join(map(str, v)) if isinstance(v, (list, tuple)) else v for k, v in record.items()}
            self.writer.writerow(row)
        else:
            self.stream.write(json.dumps(record) + "\n")


def _state_record(state, amp: complex) -> dict:
    return {"state": list(state), "re": amp.real, "im": amp.imag, "prob": abs(amp) ** 2}


def _load(args) -> tuple:
    U = load_unitary(args.unitary)
    U = as_unitary(U, check=not args.no_unitarity_check)
    return U


def _parse_state(text: str, m: int | None = None) -> FockState:
    try:
        state = FockState.parse(text)
    except ValueError as exc:
        raise ValueError(f"bad state {text!r}: {exc}") from exc
    if m is not None and state.m != m:
        raise ValueError(f"state {text!r} has {state.m} modes, the unitary has {m}")
    return state


def cmd_full(args) -> int:
    U = _load(args)
    s = _parse_state(args.input, U.shape[0])
    structures = None
    if args.use_precomputed:
        structures = read_structures(args.precompute_dir, s.m, s.n)
    dist = slos_full(
        s, U, keep_layers=False, check_unitary=False, threads=args.threads, structures=structures
    )
    out = _Emitter(args.format, ["state", "re", "im", "prob"])
    for state, amp, prob in dist:
        if prob >= args.min_prob:
            out.emit(_state_record(state, amp))
    return 0


def cmd_gen(args) -> int:
    U = _load(args)
    m = U.shape[0]
    inputs = [_parse_state(t, m) for t in args.input]
    n = inputs[0].n
    if args.mask:
        outputs = MaskSet(sum((MaskSet.parse(p, n).masks for p in args.mask), ()))
    elif args.output:
        outputs = [_parse_state(t, m) for t in args.output]
    else:
        raise ValueError("gen needs --output or --mask")
    res = slos_gen(inputs, outputs, U, check_unitary=False, conjugate_trick=args.conjugate_trick)
    out = _Emitter(args.format, ["input", "state", "re", "im", "prob"])
    for (s, t), amp in res.items():
        if abs(amp) ** 2 >= args.min_prob:
            out.emit({"input": list(s), **_state_record(t, amp)})
    return 0


def cmd_sample(args) -> int:
    U = _load(args)
    s = _parse_state(args.input, U.shape[0])
    draws = sample(s, U, args.count, args.seed, check_unitary=False)
    if args.histogram:
        out = _Emitter(args.format, ["state", "count"])
        for state, c in sorted(Counter(draws).items()):
            out.emit({"state": list(state), "count": c})
    else:
        out = _Emitter(args.format, ["sample", "state"])
        for i, state in enumerate(draws):
            out.emit({"sample": i, "state": list(state)})
    return 0


def cmd_threshold(args) -> int:
    U = _load(args)
    s = _parse_state(args.input, U.shape[0])
    res = slos_hybrid(s, U, Threshold(args.eta), check_unitary=False)
    out = _Emitter(args.format, ["state", "re", "im", "prob"])
    for state, amp, prob in res.distribution:
        if prob >= args.min_prob:
            out.emit(_state_record(state, amp))
    print(f"selected {len(res.selected)} states, cumulative probability {res.cumulative_probability:.12g}",
          file=sys.stderr)
    return 0


def cmd_precompute(args) -> int:
    mask = MaskSet.parse(args.mask, args.n) if args.mask else None
    structures = build_layer_structures(args.m, args.n, mask)
    for path in write_structures(args.precompute_dir, structures.bases, structures.maps):
        print(path)
    return 0


def cmd_bench(args) -> int:
    out = _Emitter("jsonl", [])
    for n in range(args.n_min, args.n_max + 1):
        out.emit({"kind": "single_output", **bench_single_output(n, args.repeats, args.seed)})
    if args.full_m:
        out.emit({"kind": "full", **bench_full(args.full_m, args.full_n or args.full_m,
                                               seed=args.seed, threads=args.threads)})
    return 0


def cmd_estimate(args) -> int:
    est = estimate(args.m, args.n).as_dict()
    print(json.dumps(est))
    return 0


def cmd_unitary(args) -> int:
    U = haar_random_unitary(args.m, args.seed)
    if args.out:
        save_unitary(args.out, U)
    else:
        from .unitary import unitary_to_json

        print(unitary_to_json(U))
    return 0


def _common(p: argparse.ArgumentParser, unitary: bool = True) -> None:
    if unitary:
        p.add_argument("--unitary", required=True, help="JSON unitary file")
        p.add_argument("--no-unitarity-check", action="store_true")
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    p.add_argument("--min-prob", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="strongsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("full", help="full output distribution of one input")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--use-precomputed", action="store_true")
    p.add_argument("--precompute-dir", default=".")
    p.set_defaults(func=cmd_full)

    p = sub.add_parser("gen", help="amplitudes between input and output sets")
    _common(p)
    p.add_argument("--input", action="append", required=True)
    p.add_argument("--output", action="append")
    p.add_argument("--mask", action="append", help="comma list of bounds, * = unbounded")
    p.add_argument("--conjugate-trick", action="store_true")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sample", help="exact samples of the output distribution")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--histogram", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("threshold", help="most probable outputs up to a cumulative probability")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--eta", type=float, required=True)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("precompute", help="write FSA1/FSM1 layer files")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mask")
    p.add_argument("--precompute-dir", default=".")
    p.set_defaults(func=cmd_precompute)

    p = sub.add_parser("bench", help="single-permanent benchmark against Glynn and Ryser")
    p.add_argument("--n-min", type=int, default=8)
    p.add_argument("--n-max", type=int, default=14)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--full-m", type=int)
    p.add_argument("--full-n", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("estimate", help="operation and memory counts")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("unitary", help="write a Haar-random unitary")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_unitary)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotUnitaryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FormatError, StateNotFoundError, FileNotFoundError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
