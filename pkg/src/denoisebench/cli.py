"""
Command-line front end.

    denoisebench noise IN.pgm OUT.pgm --kind spn --density 0.3 --seed 42
    denoisebench filter IN.pgm OUT.pgm --spec amf:smax=7
    denoisebench eval REF.pgm CANDIDATE.pgm
    denoisebench bench [IN.pgm | --gen-test-image[=WxH]] --out-dir results/
    denoisebench gen-test-image OUT.pgm [--size WxH]

Standard output carries CSV only; messages go to standard error.
Exit codes: 0 ok, 2 I/O or file-format error, 3 invalid parameters.
"""

from __future__ import annotations

import argparse
import logging
import secrets
import sys
import time

from . import bench, synthetic
from .filters import FilterSpecError, parse_filter_list, parse_filter_spec
from .image import PGMError, read_pgm, write_pgm
from .metrics import evaluate
from .noise import SEED_MASK, NoiseKind, apply_noise, density_to_params

log = logging.getLogger("denoisebench")

EXIT_OK = 0
EXIT_IO = 2
EXIT_PARAM = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def parse_seed(text: str) -> int:
    """Decimal or ``0x``-prefixed hexadecimal unsigned 64-bit integer."""
    t = text.strip().lower()
    try:
        value = int(t, 16) if t.startswith("0x") else int(t, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= value <= SEED_MASK:
        raise argparse.ArgumentTypeError(f"seed {text!r} is outside the unsigned 64-bit range")
    return value


def _fraction(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid fraction {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text!r} is not in [0, 1]")
    return value


def _fraction_list(text: str) -> list[float]:
    return [_fraction(p) for p in text.split(",") if p.strip()]


def _kinds(text: str) -> list[NoiseKind]:
    try:
        return [NoiseKind.parse(p.strip()) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _resolve_seed(seed):
    if seed is None:
        seed = secrets.randbits(64)
        print(f"seed=0x{seed:016x}", file=sys.stderr)
    return seed


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="denoisebench", description="Grayscale noise/filter benchmark tools.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    n = sub.add_parser("noise", help="corrupt a PGM image")
    n.add_argument("input")
    n.add_argument("output")
    n.add_argument("--kind", required=True, type=NoiseKind.parse, help="spn, rvin or spkn")
    n.add_argument("--density", required=True, type=_fraction)
    n.add_argument("--seed", type=parse_seed, help="decimal or 0x-hex; random if omitted")

    f = sub.add_parser("filter", help="filter a PGM image")
    f.add_argument("input")
    f.add_argument("output")
    f.add_argument("--spec", required=True, help="e.g. smf, gf:size=3,sigma=0.5, amf:smax=7")

    e = sub.add_parser("eval", help="print mse,psnr_db for two images")
    e.add_argument("reference")
    e.add_argument("candidate")

    b = sub.add_parser("bench", help="run the density sweep")
    b.add_argument("input", nargs="?")
    b.add_argument("--gen-test-image", nargs="?", const="256x256", default=None, metavar="WxH")
    b.add_argument("--kinds", type=_kinds, default=list(bench.ALL_KINDS),
                   help="comma list of noise kinds (default spn,rvin,spkn)")
    b.add_argument("--densities", type=_fraction_list, default=list(bench.DEFAULT_DENSITIES))
    b.add_argument("--filters", default="mf,awf,gf,smf,amf")
    b.add_argument("--seed", type=parse_seed)
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--mse-reference", choices=bench.MSE_REFERENCES, default="original")
    b.add_argument("--plot-metric", choices=("psnr", "mse"), default="psnr")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out-dir", required=True)

    g = sub.add_parser("gen-test-image", help="write the synthetic Saturn-like test image")
    g.add_argument("output")
    g.add_argument("--size", default="256x256", metavar="WxH")
    return p


def cmd_noise(args) -> int:
    img = read_pgm(args.input)
    spec = density_to_params(args.kind, args.density)
    seed = _resolve_seed(args.seed)
    noisy = apply_noise(img, spec, seed)
    write_pgm(args.output, noisy)
    print(evaluate(img, noisy).as_csv())
    return EXIT_OK


def cmd_filter(args) -> int:
    try:
        spec = parse_filter_spec(args.spec)
    except FilterSpecError as exc:
        raise UsageError(f"bad filter spec token {exc.token!r}: {exc}") from None
    img = read_pgm(args.input)
    write_pgm(args.output, spec.apply(img))
    return EXIT_OK


def cmd_eval(args) -> int:
    ref = read_pgm(args.reference)
    cand = read_pgm(args.candidate)
    print(evaluate(ref, cand).as_csv())
    return EXIT_OK


def cmd_bench(args) -> int:
    if (args.input is None) == (args.gen_test_image is None):
        raise UsageError("give exactly one of INPUT or --gen-test-image")
    try:
        filters = parse_filter_list(args.filters)
    except FilterSpecError as exc:
        raise UsageError(f"bad filter spec token {exc.token!r}: {exc}") from None
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    if args.input is not None:
        img = read_pgm(args.input)
    else:
        img = synthetic.saturn_like(*synthetic.parse_size(args.gen_test_image))
    config = bench.SweepConfig(
        input_image=img,
        noise_kinds=args.kinds,
        densities=args.densities,
        filters=filters,
        master_seed=_resolve_seed(args.seed),
        trials=args.trials,
        mse_reference=args.mse_reference,
    )
    start = time.perf_counter()
    grid = bench.run_sweep(config, workers=args.workers)
    files = bench.write_outputs(grid, args.out_dir, plot_metric=args.plot_metric)
    log.info("sweep finished in %.1f s; wrote %s", time.perf_counter() - start, ", ".join(files))
    sys.stdout.write(bench.emit_plot_data(grid, "psnr").decode("utf-8"))
    return EXIT_OK


def cmd_gen_test_image(args) -> int:
    width, height = synthetic.parse_size(args.size)
    write_pgm(args.output, synthetic.saturn_like(width, height))
    return EXIT_OK


COMMANDS = {
    "noise": cmd_noise,
    "filter": cmd_filter,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "gen-test-image": cmd_gen_test_image,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (OSError, PGMError) as exc:
        print(f"denoisebench: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError) as exc:
        print(f"denoisebench: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
