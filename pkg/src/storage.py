import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Union

from src.errors import UsageError
from src.models import Orientation, RuleTable, TableRow
from src.utils import default_checkpoint_dir

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _write_json_atomic(path: Path, obj: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(obj, sort_keys=True) + "\n", encoding="utf-8")
    tmp.replace(path)


# --------------------------------------------------------------------------- rules

def rule_to_dict(rule: RuleTable) -> Dict[str, Any]:
    return {"n": rule.n, "orientation": rule.orientation.value, "table": list(rule.table)}


def rule_from_dict(data: Dict[str, Any]) -> RuleTable:
    """Validate the rule JSON schema {"n", "orientation", "table"}."""
    try:
        n = data["n"]
        orientation = Orientation(data["orientation"])
        table = tuple(data["table"])
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"malformed rule JSON: {e}")
    if not isinstance(n, int) or not all(isinstance(v, int) for v in table):
        raise UsageError("rule JSON needs integer n and integer table entries")
    try:
        return RuleTable(n=n, orientation=orientation, table=table)
    except ValueError as e:
        raise UsageError(f"invalid rule: {e}")


def save_rule(rule: RuleTable, path: PathLike) -> Path:
    path = Path(path)
    _write_json_atomic(path, rule_to_dict(rule))
    return path


def load_rule(path: PathLike) -> RuleTable:
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"rule file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise UsageError(f"rule file {path} is not valid JSON: {e}")
    return rule_from_dict(data)


def sidecar_path(rule_path: PathLike) -> Path:
    """rule.json -> rule.encoding.json"""
    rule_path = Path(rule_path)
    return rule_path.with_name(rule_path.stem + ".encoding.json")


def save_sidecar(sidecar: Dict[str, Any], rule_path: PathLike) -> Path:
    path = sidecar_path(rule_path)
    _write_json_atomic(path, sidecar)
    return path


# --------------------------------------------------------------------------- tables

def write_table_csv(header: Sequence[str], rows: Sequence[TableRow], out: TextIO) -> None:
    """One line per computed row; columns are looked up in parameters, then values. Absent values stay empty."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if not row.computed:
            continue
        merged = {**row.parameters, **row.values}
        writer.writerow(["" if merged.get(col) is None else merged[col] for col in header])


def table_csv(header: Sequence[str], rows: Sequence[TableRow]) -> str:
    buf = io.StringIO()
    write_table_csv(header, rows, buf)
    return buf.getvalue()


def read_table_csv(path: PathLike) -> List[Dict[str, Optional[int]]]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        return [
            {k: (int(v) if v != "" else None) for k, v in record.items()}
            for record in csv.DictReader(handle)
        ]


# --------------------------------------------------------------------------- checkpoints

class CheckpointStore:
    """Resumable scan state, one JSON file per scan key."""

    def __init__(self, directory: Optional[PathLike] = None):
        self.directory = Path(directory if directory is not None else default_checkpoint_dir())

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def load(self, key: str) -> Optional[Dict[str, Any]]:
        path = self._path(key)
        if not path.is_file():
            return None
        state = json.loads(path.read_text(encoding="utf-8"))
        logger.info("resuming %s from rule %d", key, state.get("next", 0))
        return state

    def save(self, key: str, state: Dict[str, Any]) -> None:
        _write_json_atomic(self._path(key), state)
        logger.info("checkpoint %s at rule %d", key, state.get("next", 0))

    def clear(self, key: str) -> None:
        path = self._path(key)
        if path.exists():
            path.unlink()
