"""Command-line interface: ``conescatter <command> [options]``.

Commands
--------
phase-shifts  channel wavenumbers and phase shifts for l in [l_min, l_max]
amplitude     scattering amplitude and cross section over an angular sweep
field         partial-wave field on a polar grid
verify        run the consistency suite
"""
import argparse
import io
import json
import math
import sys
import warnings

import numpy as np

from . import model, verify, waves
from .errors import ConeScatterError, InvalidParams
from .model import ScatteringParams

EXIT_OK = 0
EXIT_BAD_ARGS = 2
EXIT_DOMAIN = 3
EXIT_VERIFY = 4

_EPILOG = """\
exit codes:
  0  success
  2  bad arguments or invalid physical parameters
  3  domain or numerical error (evanescent channel, regime violation,
     non-convergence, ...)
  4  verification failure (at least one non-skipped check failed)

Natural units throughout (hbar = c = 1). Flags override values read from
--config, a file of key=value lines using the long flag names
(mass, energy, varpi, q, alpha, spin, lmax, lmin, r, radii, angles, format, out).
"""

_CONFIG_KEYS = {"mass", "energy", "varpi", "q", "alpha", "spin", "lmax", "lmin",
                "r", "radii", "angles", "format", "out", "grid", "tolerance_scale",
                "workers"}
_DEFAULTS = {
    "mass": 1.0, "energy": 1.0, "varpi": 0.0, "spin": 1, "lmax": 30, "lmin": None,
    "r": 50.0, "radii": None, "angles": "0:2pi:16", "format": "csv", "out": None,
    "grid": "default", "tolerance_scale": 1.0, "workers": 1,
}


class UsageError(Exception):
    """Bad command-line or configuration input (exit code 2)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_angle(tok):
    tok = tok.strip().lower().replace(" ", "")
    if tok.endswith("pi"):
        head = tok[:-2].rstrip("*")
        return (float(head) if head else 1.0) * math.pi
    return float(tok)


def parse_range(spec, name, inclusive):
    """Parse ``a:b:n``. Angles exclude ``b``; radii include it."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError("%s must look like a:b:n, got %r" % (name, spec))
    try:
        a, b = _parse_angle(parts[0]), _parse_angle(parts[1])
        n = int(parts[2])
    except ValueError as exc:
        raise UsageError("cannot parse %s %r: %s" % (name, spec, exc)) from None
    if n < 1:
        raise UsageError("%s count must be >= 1" % name)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise UsageError("%s bounds must be finite" % name)
    if inclusive:
        return np.linspace(a, b, n)
    return a + (b - a) * np.arange(n) / n


def _read_config(path):
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError("cannot read config %s: %s" % (path, exc)) from None
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError("%s:%d: expected key=value" % (path, i))
        key, val = (t.strip() for t in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise UsageError("%s:%d: unknown key %r" % (path, i, key))
        out[key] = val
    return out


def _coerce(key, val):
    if val is None:
        return None
    try:
        if key in ("mass", "energy", "varpi", "q", "alpha", "r", "tolerance_scale"):
            return float(val)
        if key in ("lmax", "lmin", "workers"):
            return int(val)
        if key == "spin":
            v = int(str(val).replace("+", ""))
            if v not in (1, -1):
                raise ValueError("spin must be +1 or -1")
            return v
        if key == "format":
            if val not in ("csv", "json"):
                raise ValueError("format must be csv or json")
    except ValueError as exc:
        raise UsageError("bad value for %s: %s" % (key, exc)) from None
    return val


def build_parser():
    parser = _Parser(prog="conescatter", description=__doc__.split("\n\n")[0],
                     epilog=_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value file; flags take precedence")
    common.add_argument("--mass", type=float)
    common.add_argument("--energy", type=float)
    common.add_argument("--varpi", type=float, help="frame rotation frequency")
    geo = common.add_mutually_exclusive_group()
    geo.add_argument("--q", type=float, help="deficit parameter q >= 1")
    geo.add_argument("--alpha", type=float, help="1/q, in (0, 1]")
    common.add_argument("--spin", choices=["+1", "1", "-1"])
    common.add_argument("--lmax", type=int)
    common.add_argument("--lmin", type=int)
    common.add_argument("--r", type=float, help="radius")
    common.add_argument("--angles", help="a:b:n, n angles from a up to (excluding) b; "
                                         "'pi' multiples allowed, e.g. 0:2pi:64")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--out", help="output file (default stdout)")

    sub.add_parser("phase-shifts", parents=[common], epilog=_EPILOG,
                   formatter_class=argparse.RawDescriptionHelpFormatter,
                   help="phase shifts per channel")
    sub.add_parser("amplitude", parents=[common], epilog=_EPILOG,
                   formatter_class=argparse.RawDescriptionHelpFormatter,
                   help="amplitude over theta = phi + pi")
    p_field = sub.add_parser("field", parents=[common], epilog=_EPILOG,
                             formatter_class=argparse.RawDescriptionHelpFormatter,
                             help="partial-wave field on a polar grid (angles are phi)")
    p_field.add_argument("--radii", help="a:b:n radii, both ends included (overrides --r)")
    p_ver = sub.add_parser("verify", parents=[common], epilog=_EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter,
                           help="run the consistency suite")
    p_ver.add_argument("--grid", help="'default', 'empty', or a JSON file with a list "
                                      "of {mass, energy, varpi, q|alpha, spin}")
    p_ver.add_argument("--tolerance-scale", type=float, dest="tolerance_scale")
    p_ver.add_argument("--workers", type=int)
    return parser


def resolve(args):
    """Merge defaults, config file and flags into one settings dict."""
    cfg_file = _read_config(args.config) if args.config else {}
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("command", "config")}
    if "q" in flags or "alpha" in flags:
        cfg_file.pop("q", None)
        cfg_file.pop("alpha", None)
    if "q" in cfg_file and "alpha" in cfg_file:
        raise UsageError("config sets both q and alpha")
    settings = dict(_DEFAULTS)
    for key, val in cfg_file.items():
        settings[key] = _coerce(key, val)
    for key, val in flags.items():
        settings[key] = _coerce(key, val)
    if settings.get("alpha") is not None:
        alpha = settings.pop("alpha")
        if not 0 < alpha <= 1:
            raise UsageError("alpha must lie in (0, 1]")
        settings["q"] = 1.0 / alpha
    settings.setdefault("q", 1.0)
    if settings["q"] is None:
        settings["q"] = 1.0
    return settings


def _params(st):
    return ScatteringParams(st["mass"], st["energy"], st["varpi"], st["q"], st["spin"])


def _pw_config(st):
    return waves.PartialWaveConfig(l_max=st["lmax"],
                                   l_min=-(st["lmax"] + 1) if st["lmin"] is None else st["lmin"])


# ---------------------------------------------------------------------------
# commands

def cmd_phase_shifts(st):
    p = _params(st)
    d = model.derive(p)
    ls = waves.channel_range(p, _pw_config(st), d)
    cols = ["l", "eta_l", "delta_eta_exact", "delta_eta_approx", "delta_topology", "note"]
    rows = []
    for l in ls:
        note = ""
        el = model.eta_l(p, int(l), d)
        exact = model.delta_eta_exact(p, int(l), d)
        try:
            approx = model.delta_eta_approx(p, int(l), d)
        except ConeScatterError as exc:
            approx = math.nan
            note = type(exc).__name__
        rows.append([int(l), el, exact, approx, model.delta_topology(p.q, int(l), p.s), note])
    return cols, rows, []


def cmd_amplitude(st):
    p = _params(st)
    d = model.derive(p)
    theta = parse_range(st["angles"], "angles", inclusive=False)
    sweep = waves.cross_section_sweep(p, theta, st["r"], d=d)
    cols = ["theta", "delta_theta", "re_f", "im_f", "dsigma", "branch", "note"]
    rows = []
    for i, th in enumerate(theta):
        rec = sweep.records[i]
        if rec is None:
            rows.append([float(th), float(th) + 2 * st["r"] * d.omega_eff,
                         math.nan, math.nan, math.nan, "error", sweep.errors[i]])
        else:
            rows.append([rec.theta, rec.delta_theta, rec.f.real, rec.f.imag,
                         rec.dsigma, rec.branch, ""])
    return cols, rows, []


def cmd_field(st):
    p = _params(st)
    d = model.derive(p)
    cfg = _pw_config(st)
    radii = (parse_range(st["radii"], "radii", inclusive=True) if st.get("radii")
             else np.array([st["r"]]))
    phis = parse_range(st["angles"], "angles", inclusive=False)
    cols = ["r", "phi", "re_field", "im_field", "abs2"]
    rows = []
    for r in radii:
        if not (0 < r < d.r_max):
            print("skipped r=%.17g: outside 0 < r < %.17g" % (r, d.r_max), file=sys.stderr)
            continue
        vals = np.atleast_1d(waves.partial_wave_field(p, np.full(phis.shape, r), phis, cfg, d))
        for phi, v in zip(phis, vals):
            rows.append([float(r), float(phi), v.real, v.imag, abs(v) ** 2])
    return cols, rows, []


def _load_grid(spec):
    if spec in (None, "default"):
        return list(verify.DEFAULT_GRID)
    if spec == "empty":
        return []
    try:
        with open(spec, encoding="utf-8") as fh:
            items = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError("cannot read grid %s: %s" % (spec, exc)) from None
    grid = []
    for item in items:
        kw = {"mass": item.get("mass", 1.0), "energy": item.get("energy", 1.0),
              "varpi": item.get("varpi", 0.0), "s": int(item.get("spin", item.get("s", 1)))}
        if "alpha" in item:
            grid.append(ScatteringParams.from_alpha(item["alpha"], **kw))
        else:
            grid.append(ScatteringParams(q=item.get("q", 1.0), **kw))
    return grid


def cmd_verify(st):
    grid = _load_grid(st.get("grid"))
    reports = verify.run_suite(grid, tolerance_scale=st["tolerance_scale"],
                               workers=max(1, st["workers"]))
    return ["name", "status", "measured_error", "tolerance"], \
        [[r.name, r.status, r.measured_error, r.tolerance] for r in reports], reports


COMMANDS = {
    "phase-shifts": cmd_phase_shifts,
    "amplitude": cmd_amplitude,
    "field": cmd_field,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# output

def fmt_float(v):
    """Fixed 17-significant-digit formatting used by every output format."""
    return "%.17g" % v


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return fmt_float(float(v))
    return str(v)


def to_csv(cols, rows):
    buf = io.StringIO()
    buf.write(",".join(cols) + "\n")
    for row in rows:
        cells = []
        for v in row:
            s = _cell(v)
            if any(ch in s for ch in ',"\n'):
                s = '"' + s.replace('"', '""') + '"'
            cells.append(s)
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def _json_floats(obj, store):
    if isinstance(obj, dict):
        return {k: _json_floats(v, store) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_floats(v, store) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return None
        store.append(fmt_float(v))
        return "\x00%d\x00" % (len(store) - 1)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def to_json(config, cols, rows, reports):
    doc = {
        "config": config,
        "rows": [dict(zip(cols, row)) for row in rows],
        "reports": verify.reports_to_json(reports),
    }
    store = []
    text = json.dumps(_json_floats(doc, store), indent=2, sort_keys=True)
    for i, s in enumerate(store):
        text = text.replace('"\\u0000%d\\u0000"' % i, s, 1)
    return text + "\n"


def _config_record(st, command):
    rec = {"command": command}
    keys = ["mass", "energy", "varpi", "q", "spin", "lmax", "lmin", "r", "radii", "angles"]
    if command == "verify":
        keys += ["grid", "tolerance_scale"]
    for k in keys:
        if st.get(k) is not None:
            rec[k] = st[k]
    return rec


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        st = resolve(args)
        if st["workers"] is not None and st["workers"] < 1:
            raise UsageError("workers must be >= 1")
    except UsageError as exc:
        print("conescatter: error: %s" % exc, file=sys.stderr)
        return EXIT_BAD_ARGS
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda m, c, *a, **k: print(
                "warning: %s: %s" % (c.__name__, m), file=sys.stderr)
            cols, rows, reports = COMMANDS[args.command](st)
    except UsageError as exc:
        print("conescatter: error: %s" % exc, file=sys.stderr)
        return EXIT_BAD_ARGS
    except InvalidParams as exc:
        print("conescatter: invalid parameters: %s" % exc, file=sys.stderr)
        return EXIT_BAD_ARGS
    except ConeScatterError as exc:
        print("conescatter: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return EXIT_DOMAIN

    if st["format"] == "json":
        text = to_json(_config_record(st, args.command), cols, rows, reports)
    else:
        text = to_csv(cols, rows)
    if st["out"]:
        with open(st["out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    if any(r.status == verify.FAIL for r in reports):
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
