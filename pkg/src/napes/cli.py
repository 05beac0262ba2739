"""Command-line front end: dataset ingestion, estimation, result emission.

Commands
--------
spectrum      1-D amplitude spectrum of a fully known record
spectrum2d    2-D amplitude spectrum over a frequency-pair grid
reconstruct   cyclic gap filling plus the final spectrum
synth         synthetic dataset generation

All frequencies are radians per sample in [0, 2*pi).  Outputs are
deterministic for fixed inputs and flags: fixed column orders, fixed
summation orders inside the estimators, numbers printed with 17
significant digits, one writer per file after all computation is done.
Exit codes: 0 success, 2 malformed data or flags, 3 numerical failure of
every grid point.
"""

import argparse
import csv
import json
import sys

import numpy as np

from .errors import DataFormatError, NapesError
from .gapped import GappedConfig, SegmentedSignal, cyclic_optimize
from .linalg import HermitianSolveConfig
from .snapshots import FrequencyGrid, SnapshotPlan, SnapshotPlan2D
from .spectral1d import spectrum
from .spectral2d import spectrum2d
from .testkit import NoiseModel, SinusoidSpec, drop_segments, gen_signal

HEADER_1D = ["index", "y_re", "y_im", "x_re", "x_im", "known"]
HEADER_2D = ["row", "col", "y_re", "y_im", "x_re", "x_im"]


def _fmt(v):
    return format(float(v), ".17g")


def _parse_float(text, where):
    try:
        return float(text)
    except ValueError:
        raise DataFormatError(f"{where}: not a number: {text!r}") from None


def _read_rows(path, header):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise DataFormatError(f"{path}: empty file")
    got = [cell.strip() for cell in rows[0]]
    if got != header:
        raise DataFormatError(f"{path}: expected header {','.join(header)}")
    return [row for row in rows[1:] if row]


def read_dataset_1d(path):
    """Parse a 1-D dataset file into (mask, y_known, x)."""
    rows = _read_rows(path, HEADER_1D)
    n = len(rows)
    if n == 0:
        raise DataFormatError(f"{path}: no data rows")
    mask = np.zeros(n, dtype=bool)
    y = np.zeros(n, dtype=np.complex128)
    x = np.zeros(n, dtype=np.complex128)
    seen = np.zeros(n, dtype=bool)
    for lineno, row in enumerate(rows, start=2):
        where = f"{path}:{lineno}"
        if len(row) != 6:
            raise DataFormatError(f"{where}: expected 6 fields, got {len(row)}")
        idx_s, y_re, y_im, x_re, x_im, known_s = (cell.strip() for cell in row)
        try:
            idx = int(idx_s)
        except ValueError:
            raise DataFormatError(f"{where}: bad index {idx_s!r}") from None
        if not 0 <= idx < n or seen[idx]:
            raise DataFormatError(f"{where}: index {idx} out of range or duplicate")
        seen[idx] = True
        if known_s not in ("0", "1"):
            raise DataFormatError(f"{where}: known must be 0 or 1, got {known_s!r}")
        if x_re == "" or x_im == "":
            raise DataFormatError(f"{where}: x fields must always be present")
        x[idx] = complex(_parse_float(x_re, where), _parse_float(x_im, where))
        if known_s == "1":
            if y_re == "" or y_im == "":
                raise DataFormatError(f"{where}: known=1 row with empty y fields")
            mask[idx] = True
            y[idx] = complex(_parse_float(y_re, where), _parse_float(y_im, where))
    if not seen.all():
        raise DataFormatError(f"{path}: indices not contiguous 0..{n - 1}")
    return mask, y[mask], x


def read_dataset_2d(path):
    """Parse a dense 2-D dataset file into (y, x) matrices."""
    rows = _read_rows(path, HEADER_2D)
    if not rows:
        raise DataFormatError(f"{path}: no data rows")
    entries = []
    max_r = max_c = -1
    for lineno, row in enumerate(rows, start=2):
        where = f"{path}:{lineno}"
        if len(row) != 6:
            raise DataFormatError(f"{where}: expected 6 fields, got {len(row)}")
        r_s, c_s, y_re, y_im, x_re, x_im = (cell.strip() for cell in row)
        try:
            r, c = int(r_s), int(c_s)
        except ValueError:
            raise DataFormatError(f"{where}: bad grid position ({r_s!r}, {c_s!r})") from None
        if r < 0 or c < 0:
            raise DataFormatError(f"{where}: negative grid position")
        yv = complex(_parse_float(y_re, where), _parse_float(y_im, where))
        xv = complex(_parse_float(x_re, where), _parse_float(x_im, where))
        entries.append((r, c, yv, xv, where))
        max_r = max(max_r, r)
        max_c = max(max_c, c)
    n, n_p = max_r + 1, max_c + 1
    if len(entries) != n * n_p:
        raise DataFormatError(
            f"{path}: {len(entries)} rows cannot cover a dense {n} x {n_p} grid")
    y = np.zeros((n, n_p), dtype=np.complex128)
    x = np.zeros((n, n_p), dtype=np.complex128)
    seen = np.zeros((n, n_p), dtype=bool)
    for r, c, yv, xv, where in entries:
        if seen[r, c]:
            raise DataFormatError(f"{where}: duplicate cell ({r}, {c})")
        seen[r, c] = True
        y[r, c] = yv
        x[r, c] = xv
    return y, x


def _spectrum_lines_1d(grid, alphas, status):
    lines = ["omega,alpha_re,alpha_im,alpha_abs,status"]
    for k, om in enumerate(grid.omegas):
        if status[k] == 0:
            a = alphas[k]
            lines.append(f"{_fmt(om)},{_fmt(a.real)},{_fmt(a.imag)},{_fmt(abs(a))},ok")
        else:
            lines.append(f"{_fmt(om)},,,,failed")
    return lines


def _spectrum_rows_json_1d(grid, alphas, status):
    rows = []
    for k, om in enumerate(grid.omegas):
        if status[k] == 0:
            a = alphas[k]
            rows.append({"omega": float(om), "alpha_re": a.real,
                         "alpha_im": a.imag, "alpha_abs": abs(a), "status": "ok"})
        else:
            rows.append({"omega": float(om), "alpha_re": None, "alpha_im": None,
                         "alpha_abs": None, "status": "failed"})
    return rows


def _spectrum_lines_2d(grid, grid_p, alphas, status):
    lines = ["omega,omega_p,alpha_re,alpha_im,alpha_abs,status"]
    for k, om in enumerate(grid.omegas):
        for j, omp in enumerate(grid_p.omegas):
            if status[k, j] == 0:
                a = alphas[k, j]
                lines.append(f"{_fmt(om)},{_fmt(omp)},{_fmt(a.real)},"
                             f"{_fmt(a.imag)},{_fmt(abs(a))},ok")
            else:
                lines.append(f"{_fmt(om)},{_fmt(omp)},,,,failed")
    return lines


def _spectrum_rows_json_2d(grid, grid_p, alphas, status):
    rows = []
    for k, om in enumerate(grid.omegas):
        for j, omp in enumerate(grid_p.omegas):
            if status[k, j] == 0:
                a = alphas[k, j]
                rows.append({"omega": float(om), "omega_p": float(omp),
                             "alpha_re": a.real, "alpha_im": a.imag,
                             "alpha_abs": abs(a), "status": "ok"})
            else:
                rows.append({"omega": float(om), "omega_p": float(omp),
                             "alpha_re": None, "alpha_im": None,
                             "alpha_abs": None, "status": "failed"})
    return rows


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _write_doc(args, csv_lines, json_doc, path=None):
    out = args.out if path is None else path
    if args.format == "csv":
        _write(out, "\n".join(csv_lines) + "\n")
    else:
        _write(out, json.dumps(json_doc) + "\n")


def _default_m(n):
    return max(1, min(n // 2, n - 1))


def _solve_config(args):
    if args.loading < 0:
        raise DataFormatError("--loading must be >= 0")
    return HermitianSolveConfig(loading=args.loading)


def cmd_spectrum(args):
    mask, y_known, x = read_dataset_1d(args.input)
    if not mask.all():
        raise DataFormatError("dataset has known=0 rows; use the reconstruct command")
    n = mask.size
    m = args.filter_length if args.filter_length is not None else _default_m(n)
    if not 1 <= m <= n:
        raise DataFormatError(f"--filter-length {m} outside [1, {n}]")
    plan = SnapshotPlan.from_data_length(n, m)
    grid = FrequencyGrid.uniform(args.grid)
    spec = spectrum(y_known, None if args.apes else x, plan, grid, _solve_config(args))
    _write_doc(args, _spectrum_lines_1d(grid, spec.alphas, spec.status),
               _spectrum_rows_json_1d(grid, spec.alphas, spec.status))
    return 3 if np.all(spec.status != 0) else 0


def cmd_spectrum2d(args):
    y, x = read_dataset_2d(args.input)
    n, n_p = y.shape
    m = args.filter_length if args.filter_length is not None else _default_m(n)
    m_p = args.filter_length2 if args.filter_length2 is not None else _default_m(n_p)
    if not 1 <= m <= n:
        raise DataFormatError(f"--filter-length {m} outside [1, {n}]")
    if not 1 <= m_p <= n_p:
        raise DataFormatError(f"--filter-length2 {m_p} outside [1, {n_p}]")
    plan = SnapshotPlan2D.from_data_shape((n, n_p), m, m_p)
    grid = FrequencyGrid.uniform(args.grid)
    grid_p = FrequencyGrid.uniform(args.grid2)
    spec = spectrum2d(y, None if args.apes else x, plan, grid, grid_p,
                      _solve_config(args))
    _write_doc(args, _spectrum_lines_2d(grid, grid_p, spec.alphas, spec.status),
               _spectrum_rows_json_2d(grid, grid_p, spec.alphas, spec.status))
    return 3 if np.all(spec.status != 0) else 0


def _derived_path(out, tag):
    if out == "-":
        return None
    stem, dot, ext = out.rpartition(".")
    if dot and "/" not in ext:
        return f"{stem}.{tag}.{ext}"
    return f"{out}.{tag}"


def cmd_reconstruct(args):
    mask, y_known, x = read_dataset_1d(args.input)
    segments = SegmentedSignal(mask=mask, y_known=y_known, x=x)
    n = mask.size
    config = GappedConfig(
        grid=FrequencyGrid.uniform(args.grid),
        m0=args.m0, m=args.filter_length,
        delta=args.delta, max_iter=args.max_iter,
        solve_cfg=_solve_config(args))
    result = cyclic_optimize(segments, config)
    spec = result.spectrum
    missing_idx = np.flatnonzero(~mask)
    recon_lines = ["index,yu_re,yu_im"]
    recon_rows = []
    for i, idx in enumerate(missing_idx):
        v = result.y_missing[i]
        recon_lines.append(f"{idx},{_fmt(v.real)},{_fmt(v.imag)}")
        recon_rows.append({"index": int(idx), "yu_re": v.real, "yu_im": v.imag})
    trace_lines = ["cycle,objective"]
    trace_rows = []
    for c, val in enumerate(result.objective_trace, start=1):
        trace_lines.append(f"{c},{_fmt(val)}")
        trace_rows.append({"cycle": c, "objective": float(val)})
    summary = {"converged": result.converged, "iterations": result.iterations}
    if args.format == "csv":
        _write(args.out, "\n".join(
            _spectrum_lines_1d(config.grid, spec.alphas, spec.status)) + "\n")
        recon_path = args.out_recon or _derived_path(args.out, "recon")
        trace_path = args.out_trace or _derived_path(args.out, "trace")
        if recon_path:
            _write(recon_path, "\n".join(recon_lines) + "\n")
        if trace_path:
            _write(trace_path, "\n".join(trace_lines) + "\n")
        print(f"converged={str(result.converged).lower()} "
              f"iterations={result.iterations}", file=sys.stderr)
    else:
        doc = {"spectrum": _spectrum_rows_json_1d(config.grid, spec.alphas, spec.status),
               "reconstruction": recon_rows, "trace": trace_rows, "summary": summary}
        _write(args.out, json.dumps(doc) + "\n")
    return 3 if np.all(spec.status != 0) else 0


def _parse_sinusoid(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise DataFormatError(f"--sinusoid expects a_re,a_im,omega, got {text!r}")
    try:
        a_re, a_im, omega = (float(p) for p in parts)
    except ValueError:
        raise DataFormatError(f"--sinusoid has non-numeric parts: {text!r}") from None
    try:
        return SinusoidSpec(amplitude=complex(a_re, a_im), omega=omega)
    except ValueError as exc:
        raise DataFormatError(str(exc)) from None


def _parse_gap(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise DataFormatError(f"--gap expects start,len, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise DataFormatError(f"--gap has non-integer parts: {text!r}") from None


def cmd_synth(args):
    specs = [_parse_sinusoid(s) for s in args.sinusoid]
    gaps = [_parse_gap(g) for g in args.gap]
    kind = "constant" if args.noise == "constant" else "unit_modulus_random_phase"
    model = NoiseModel(kind=kind, seed=args.seed)
    if args.n < 1:
        raise DataFormatError("--n must be >= 1")
    y, x = gen_signal(specs, model, args.n, args.snr_db, args.seed)
    try:
        segments = drop_segments(y, gaps, x)
    except ValueError as exc:
        raise DataFormatError(str(exc)) from None
    lines = [",".join(HEADER_1D)]
    rows = []
    for t in range(args.n):
        if segments.mask[t]:
            lines.append(f"{t},{_fmt(y[t].real)},{_fmt(y[t].imag)},"
                         f"{_fmt(x[t].real)},{_fmt(x[t].imag)},1")
            rows.append({"index": t, "y_re": y[t].real, "y_im": y[t].imag,
                         "x_re": x[t].real, "x_im": x[t].imag, "known": 1})
        else:
            lines.append(f"{t},,,{_fmt(x[t].real)},{_fmt(x[t].imag)},0")
            rows.append({"index": t, "y_re": None, "y_im": None,
                         "x_re": x[t].real, "x_im": x[t].imag, "known": 0})
    _write_doc(args, lines, rows)
    return 0


def _add_common_out(p):
    p.add_argument("--out", default="-", help="output path, - for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_spectrum_flags(p):
    p.add_argument("--filter-length", type=int, default=None,
                   help="window length m (default floor(n/2), capped at n-1)")
    p.add_argument("--grid", type=int, default=256,
                   help="number of uniform frequency bins (default 256)")
    p.add_argument("--loading", type=float, default=1e-8,
                   help="relative diagonal loading (default 1e-8)")
    p.add_argument("--apes", action="store_true",
                   help="ignore the x columns and run plain APES")
    _add_common_out(p)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="napes",
        description="Filter-bank amplitude spectra with a known reference "
                    "sequence; frequencies in radians/sample in [0, 2*pi).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="1-D spectrum of a fully known record")
    p.add_argument("input", help="dataset csv (index,y_re,y_im,x_re,x_im,known)")
    _add_spectrum_flags(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("spectrum2d", help="2-D spectrum over a frequency-pair grid")
    p.add_argument("input", help="dataset csv (row,col,y_re,y_im,x_re,x_im)")
    _add_spectrum_flags(p)
    p.add_argument("--filter-length2", type=int, default=None,
                   help="window length m' for the second axis")
    p.add_argument("--grid2", type=int, default=256,
                   help="bins for the second axis (default 256)")
    p.set_defaults(func=cmd_spectrum2d)

    p = sub.add_parser("reconstruct", help="fill gaps and estimate the spectrum")
    p.add_argument("input", help="dataset csv with known=0 rows for the gaps")
    _add_spectrum_flags(p)
    p.add_argument("--m0", type=int, default=None,
                   help="initialization window (default floor(n/2))")
    p.add_argument("--delta", type=float, default=1e-6,
                   help="convergence threshold (default 1e-6)")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--out-recon", default=None,
                   help="missing-sample csv (default: derived from --out)")
    p.add_argument("--out-trace", default=None,
                   help="objective-trace csv (default: derived from --out)")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--sinusoid", action="append", default=[],
                   metavar="A_RE,A_IM,OMEGA",
                   help="add one component (repeatable)")
    p.add_argument("--n", type=int, required=True, help="record length")
    p.add_argument("--snr-db", type=float, default=None,
                   help="residual SNR in dB (default: no residual)")
    p.add_argument("--noise", choices=("constant", "random-phase"),
                   default="random-phase", help="reference model")
    p.add_argument("--gap", action="append", default=[], metavar="START,LEN",
                   help="mark a run of samples missing (repeatable)")
    p.add_argument("--seed", type=int, default=0)
    _add_common_out(p)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NapesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
