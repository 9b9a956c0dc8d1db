"""Model files, sweep configurations and report formats.

Model and sweep files are YAML documents carrying ``schema_version: 1``.
Coefficients are written as mappings with a ``form`` key::

    {form: constant, value: 1.0}
    {form: cosine, offset: 1.0, amplitude: 0.5, phase: 0.0}
    {form: square, low: 1.0, high: 4.0, duty: 0.5, phase: 0.0}
    {form: sampled, values: [1.0, 2.0], phase: 0.0}

A bare number is accepted as a constant.  Unknown keys are rejected with the
offending path in the message.

Reports are either ``key = value`` summaries or comma-separated tables with
``# key = value`` metadata lines.
"""
import csv
import hashlib
import io
import json
import math

import yaml

from .cellcycle import AgeTimeCoefficient, CellCycleModel
from .coefficients import Constant, Cosine, PeriodicMatrix, PeriodicMatrixSeq, Sampled, SquareWave
from .errors import InvalidInputError

SCHEMA_VERSION = 1
KINDS = ("ode", "discrete", "cellcycle")


class SchemaError(InvalidInputError):
    """A model or configuration document does not match the schema."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def _join(path, key):
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else str(key)


def _mapping(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise SchemaError(path, f"expected a mapping, got {type(obj).__name__}")
    for key in obj:
        if key not in required and key not in optional:
            raise SchemaError(_join(path, key), "unknown key")
    for key in required:
        if key not in obj:
            raise SchemaError(_join(path, key), "missing required key")
    return obj


def _number(obj, path):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise SchemaError(path, f"expected a number, got {obj!r}")
    value = float(obj)
    if not math.isfinite(value):
        raise SchemaError(path, f"expected a finite number, got {obj!r}")
    return value


def _integer(obj, path):
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise SchemaError(path, f"expected an integer, got {obj!r}")
    return obj


def _sequence(obj, path):
    if not isinstance(obj, list):
        raise SchemaError(path, f"expected a list, got {type(obj).__name__}")
    return obj


def _wrap(path, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SchemaError:
        raise
    except InvalidInputError as exc:
        raise SchemaError(path, str(exc)) from None


# ---------------------------------------------------------------- coefficients


_FORM_KEYS = {
    "constant": (("form", "value"), ()),
    "cosine": (("form", "offset", "amplitude"), ("phase",)),
    "square": (("form", "low", "high", "duty"), ("phase",)),
    "sampled": (("form", "values"), ("phase",)),
}


def scalar_from_dict(obj, period, path="coefficient"):
    if not isinstance(obj, dict):
        return _wrap(path, Constant, _number(obj, path), period)
    form = obj.get("form")
    if form not in _FORM_KEYS:
        raise SchemaError(_join(path, "form"), f"expected one of {sorted(_FORM_KEYS)}, got {form!r}")
    required, optional = _FORM_KEYS[form]
    _mapping(obj, path, required, optional)

    def num(key, default=None):
        if key not in obj:
            return default
        return _number(obj[key], _join(path, key))

    if form == "constant":
        return _wrap(path, Constant, num("value"), period)
    if form == "cosine":
        return _wrap(path, Cosine, num("offset"), num("amplitude"), num("phase", 0.0), period)
    if form == "square":
        return _wrap(path, SquareWave, num("low"), num("high"), num("duty"), num("phase", 0.0), period)
    values = [_number(v, _join(_join(path, "values"), k)) for k, v in enumerate(_sequence(obj["values"], _join(path, "values")))]
    return _wrap(path, Sampled, tuple(values), num("phase", 0.0), period)


def scalar_to_dict(u):
    if isinstance(u, Constant):
        return {"form": "constant", "value": float(u.value)}
    if isinstance(u, Cosine):
        return {"form": "cosine", "offset": float(u.offset), "amplitude": float(u.amplitude), "phase": float(u.phase)}
    if isinstance(u, SquareWave):
        return {
            "form": "square",
            "low": float(u.low),
            "high": float(u.high),
            "duty": float(u.duty),
            "phase": float(u.phase),
        }
    if isinstance(u, Sampled):
        return {"form": "sampled", "values": [float(v) for v in u.values], "phase": float(u.phase)}
    raise TypeError(f"cannot serialize {type(u).__name__}")


def age_from_dict(obj, period, path):
    if isinstance(obj, dict) and "age" in obj:
        kind = obj["age"]
        if kind == "uniform":
            _mapping(obj, path, ("age", "rate"))
            return AgeTimeCoefficient.uniform(scalar_from_dict(obj["rate"], period, _join(path, "rate")))
        if kind == "gate":
            _mapping(obj, path, ("age", "onset", "rate"))
            onset = _number(obj["onset"], _join(path, "onset"))
            rate = scalar_from_dict(obj["rate"], period, _join(path, "rate"))
            return _wrap(path, AgeTimeCoefficient.gate, onset, rate)
        if kind == "sampled":
            _mapping(obj, path, ("age", "spacing", "rates"))
            spacing = _number(obj["spacing"], _join(path, "spacing"))
            rates_path = _join(path, "rates")
            rates = [scalar_from_dict(r, period, _join(rates_path, k)) for k, r in enumerate(_sequence(obj["rates"], rates_path))]
            return _wrap(path, AgeTimeCoefficient.sampled, spacing, rates)
        raise SchemaError(_join(path, "age"), f"expected uniform, gate or sampled, got {kind!r}")
    return _wrap(path, AgeTimeCoefficient.uniform, scalar_from_dict(obj, period, path))


def age_to_dict(c):
    if c.kind == "uniform":
        return scalar_to_dict(c.parts[0])
    if c.kind == "gate":
        return {"age": "gate", "onset": float(c.onset), "rate": scalar_to_dict(c.parts[0])}
    return {"age": "sampled", "spacing": float(c.spacing), "rates": [scalar_to_dict(p) for p in c.parts]}


# ---------------------------------------------------------------- models


def model_from_dict(doc):
    """Build a PeriodicMatrix, PeriodicMatrixSeq or CellCycleModel from a parsed document."""
    if not isinstance(doc, dict):
        raise SchemaError("", "model document must be a mapping")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise SchemaError("kind", f"expected one of {KINDS}, got {kind!r}")
    if "period" not in doc:
        raise SchemaError("period", "missing required key")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError("schema_version", f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})")

    if kind == "ode":
        _mapping(doc, "", ("kind", "period", "matrix"), ("schema_version",))
        period = _number(doc["period"], "period")
        if period <= 0:
            raise SchemaError("period", "must be positive")
        rows = _sequence(doc["matrix"], "matrix")
        entries = []
        for i, row in enumerate(rows):
            rpath = _join("matrix", i)
            row = _sequence(row, rpath)
            if len(row) != len(rows):
                raise SchemaError(rpath, f"expected {len(rows)} entries, got {len(row)}")
            entries.append(tuple(scalar_from_dict(u, period, _join(rpath, j)) for j, u in enumerate(row)))
        for i, row in enumerate(entries):
            for j, u in enumerate(row):
                if i != j and u.minimum() < 0:
                    raise SchemaError(f"matrix[{i}][{j}]", f"off-diagonal entry takes negative values (minimum {u.minimum()!r})")
        return _wrap("matrix", PeriodicMatrix, tuple(entries))

    if kind == "discrete":
        _mapping(doc, "", ("kind", "period", "matrices"), ("schema_version",))
        p = _integer(doc["period"], "period")
        mats = _sequence(doc["matrices"], "matrices")
        if p < 1 or len(mats) != p:
            raise SchemaError("period", f"period {p} must equal the number of matrices ({len(mats)})")
        parsed = []
        for k, mat in enumerate(mats):
            mpath = _join("matrices", k)
            rows = _sequence(mat, mpath)
            parsed.append([[_number(v, _join(_join(mpath, i), j)) for j, v in enumerate(_sequence(r, _join(mpath, i)))]
                           for i, r in enumerate(rows)])
            for i, r in enumerate(parsed[-1]):
                for j, v in enumerate(r):
                    if v < 0:
                        raise SchemaError(f"matrices[{k}][{i}][{j}]", f"entry must be nonnegative, got {v!r}")
        return _wrap("matrices", PeriodicMatrixSeq, tuple(parsed))

    _mapping(doc, "", ("kind", "period", "phases"), ("schema_version", "x_max"))
    period = _number(doc["period"], "period")
    if period <= 0:
        raise SchemaError("period", "must be positive")
    phases = _sequence(doc["phases"], "phases")
    if not phases:
        raise SchemaError("phases", "need at least one phase")
    apoptosis, transition = [], []
    for i, ph in enumerate(phases):
        ppath = _join("phases", i)
        _mapping(ph, ppath, ("apoptosis", "transition"))
        apoptosis.append(age_from_dict(ph["apoptosis"], period, _join(ppath, "apoptosis")))
        transition.append(age_from_dict(ph["transition"], period, _join(ppath, "transition")))
    x_max = _number(doc["x_max"], "x_max") if "x_max" in doc else None
    return _wrap("", CellCycleModel, tuple(apoptosis), tuple(transition), x_max)


def model_kind(model):
    if isinstance(model, PeriodicMatrix):
        return "ode"
    if isinstance(model, PeriodicMatrixSeq):
        return "discrete"
    if isinstance(model, CellCycleModel):
        return "cellcycle"
    raise TypeError(f"not a model: {type(model).__name__}")


def model_to_dict(model):
    kind = model_kind(model)
    doc = {"schema_version": SCHEMA_VERSION, "kind": kind}
    if kind == "ode":
        doc["period"] = float(model.period)
        doc["matrix"] = [[scalar_to_dict(u) for u in row] for row in model.entries]
    elif kind == "discrete":
        doc["period"] = model.period
        doc["matrices"] = [[[float(v) for v in row] for row in m] for m in model.matrices]
    else:
        doc["period"] = float(model.period)
        doc["x_max"] = float(model.x_max)
        doc["phases"] = [
            {"apoptosis": age_to_dict(d), "transition": age_to_dict(k)}
            for d, k in zip(model.apoptosis, model.transition)
        ]
    return doc


def dumps_model(model):
    return yaml.safe_dump(model_to_dict(model), sort_keys=False, default_flow_style=None)


def loads_model(text):
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SchemaError("", f"not a valid YAML document ({exc})") from None
    return model_from_dict(doc)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))


def model_digest(model):
    """Short stable hash of the canonical serialized model."""
    canon = json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


# ---------------------------------------------------------------- reports


def format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_summary(fh, items):
    for key, value in items.items():
        fh.write(f"{key} = {format_value(value)}\n")


def read_summary(text):
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise SchemaError("", f"malformed summary line {line!r}")
        out[key.strip()] = value.strip()
    return out


def write_table(fh, header, rows, meta=None, trailer=None):
    """Comma-separated table with ``# key = value`` metadata before and after."""
    for key, value in (meta or {}).items():
        fh.write(f"# {key} = {format_value(value)}\n")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    fh.write(buf.getvalue())
    for key, value in (trailer or {}).items():
        fh.write(f"# {key} = {format_value(value)}\n")


def read_table(text):
    """Parse a table written by :func:`write_table` into ``(meta, header, rows)``."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                meta[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    reader = list(csv.reader(body))
    if not reader:
        return meta, [], []
    return meta, reader[0], reader[1:]


# ---------------------------------------------------------------- sweep configs

_SWEEP_KEYS = (
    "system", "seed", "trials", "dim", "period", "forms", "scheme", "tolerance",
    "time_period", "steps", "dx", "periods_warmup", "periods_measure",
)


def _range(obj, path):
    if isinstance(obj, int) and not isinstance(obj, bool):
        return (obj, obj)
    seq = _sequence(obj, path)
    if len(seq) != 2:
        raise SchemaError(path, "expected [lo, hi]")
    return tuple(_integer(v, _join(path, k)) for k, v in enumerate(seq))


def sweep_config_from_dict(doc):
    from .lab import SweepConfig

    if not isinstance(doc, dict):
        raise SchemaError("", "sweep configuration must be a mapping")
    _mapping(doc, "", ("system", "seed", "trials"), _SWEEP_KEYS + ("schema_version",))
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaError("schema_version", f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})")
    kw = {"system": doc["system"], "seed": _integer(doc["seed"], "seed"), "trials": _integer(doc["trials"], "trials")}
    for key in ("dim", "period"):
        if key in doc:
            kw[key] = _range(doc[key], key)
    if "forms" in doc:
        forms = doc["forms"]
        if not isinstance(forms, dict):
            raise SchemaError("forms", "expected a mapping of form name to weight")
        kw["forms"] = {str(k): _number(v, _join("forms", k)) for k, v in forms.items()}
    for key in ("tolerance", "time_period", "dx"):
        if key in doc and doc[key] is not None:
            kw[key] = _number(doc[key], key)
    for key in ("steps", "periods_warmup", "periods_measure"):
        if key in doc:
            kw[key] = _integer(doc[key], key)
    if "scheme" in doc:
        kw["scheme"] = doc["scheme"]
    try:
        return SweepConfig(**kw)
    except InvalidInputError as exc:
        raise SchemaError("", str(exc)) from None


def sweep_config_to_dict(cfg):
    doc = {"schema_version": SCHEMA_VERSION}
    for key in _SWEEP_KEYS:
        value = getattr(cfg, key)
        if isinstance(value, tuple):
            value = list(value)
        elif isinstance(value, dict):
            value = dict(value)
        doc[key] = value
    return doc


def load_sweep_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise SchemaError("", f"not a valid YAML document ({exc})") from None
    return sweep_config_from_dict(doc)
