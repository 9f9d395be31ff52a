"""Generate tests/fixtures/table1_run.jsonl.gz: a synthetic run shaped like a
published eight-row outcome table.

Only the per-row cell counts are taken from the published table.  Targets,
diagnostics, and the split of the "Cannot Apply" column into engine refusals
and crashes are synthetic, drawn from a fixed seed.

Usage: python tools/make_table1_fixture.py [output]
"""

from __future__ import annotations

import gzip
import json
import random
import sys
from pathlib import Path

from refharness.checker.codes import (
    CALL_ERROR,
    INCONSISTENT_OVERRIDE,
    MISSING_PARAMETER_ANNOTATION,
    MISSING_RETURN_ANNOTATION,
    PARSING_FAILURE,
    UNBOUND_NAME,
    UNDEFINED_ATTRIBUTE,
    UNEXPECTED_KEYWORD,
    UNSUPPORTED_OPERAND,
)
from refharness.checker.model import NormalizedReport
from refharness.corpus import TargetSite
from refharness.diff import diff_reports
from refharness.strategy import RefactoringRequest, RefactoringType, SeedTag, StrategyKind
from refharness.triage import AttemptRecord, Classification, OutcomeSummary, TriageLabel, classify

M, F, K = StrategyKind.PROJECT_METHOD_NAMES, StrategyKind.PROJECT_FIELD_NAMES, StrategyKind.KEYWORDS

# (type, strategies, variables, cannot_apply, failures, false_positives, correct, crashes, failure key pool)
ROWS = [
    (RefactoringType.INLINE_METHOD, (M,), 150, 50, 21, 15, 64, 9, [UNEXPECTED_KEYWORD, UNBOUND_NAME, CALL_ERROR]),
    (RefactoringType.RENAME_FIELD, (K,), 167, 1, 166, 0, 0, 0, [PARSING_FAILURE]),
    (RefactoringType.RENAME_FIELD, (M,), 167, 1, 30, 4, 132, 0, [UNDEFINED_ATTRIBUTE, CALL_ERROR, INCONSISTENT_OVERRIDE]),
    (RefactoringType.RENAME_METHOD, (K,), 150, 0, 150, 0, 0, 0, [PARSING_FAILURE]),
    (RefactoringType.RENAME_METHOD, (F,), 150, 1, 39, 6, 104, 1, [UNDEFINED_ATTRIBUTE, UNSUPPORTED_OPERAND, CALL_ERROR]),
    (RefactoringType.USE_FUNCTION, (M,), 28, 6, 0, 0, 22, 2, []),
    (RefactoringType.EXTRACT_METHOD, (M,), 166, 0, 62, 103, 1, 0, [UNBOUND_NAME, UNDEFINED_ATTRIBUTE]),
    (RefactoringType.MOVE_FIELD_METHOD, (M, F), 174, 138, 12, 23, 1, 20, [UNDEFINED_ATTRIBUTE, UNBOUND_NAME]),
]

BASELINE = NormalizedReport({MISSING_RETURN_ANNOTATION: 40, MISSING_PARAMETER_ANNOTATION: 55})


def _target(rtype: RefactoringType, n: int) -> TargetSite:
    kind = {"RenameField": "field", "RenameClass": "class"}.get(rtype.value, "method")
    name = f"blob.Blob{n % 17}.member{n}"
    start = 100 + 40 * n
    return TargetSite("textblob/blob.py", start, start + len(name.rsplit(".", 1)[-1]), kind, name)


def _params(rtype: RefactoringType, rng: random.Random) -> dict:
    if rtype.is_rename:
        return {"new_name": rng.choice(["parse", "words", "tags", "class", "lambda", "string"])}
    if rtype is RefactoringType.EXTRACT_METHOD:
        start = rng.randrange(200, 5000)
        return {"extracted_name": rng.choice(["parse", "words", "tags"]), "region": [start, start + 80]}
    if rtype is RefactoringType.MOVE_FIELD_METHOD:
        return {"destination": "blob.Word"}
    return {}


def build(seed: int = 0) -> list[dict]:
    rng = random.Random(seed)
    records, attempt = [], 0
    for rtype, strategies, variables, cannot, failures, false_pos, correct, crashes, pool in ROWS:
        outcomes = (
            ["crash"] * crashes
            + ["refuse"] * (cannot - crashes)
            + ["fail"] * failures
            + ["fp"] * false_pos
            + ["ok"] * correct
        )
        assert len(outcomes) == variables
        rng.shuffle(outcomes)
        for i, what in enumerate(outcomes):
            attempt += 1
            strategy = strategies[i % len(strategies)]
            request = RefactoringRequest(rtype, _target(rtype, attempt), _params(rtype, rng), SeedTag(strategy.value, seed, i))
            if what == "crash":
                outcome = OutcomeSummary("Crashed", "engine raised an internal error", engine="synthetic")
                record = AttemptRecord(attempt, request, outcome, Classification.CRASHED, before=BASELINE,
                                       snapshot_id="table1")
            elif what == "refuse":
                outcome = OutcomeSummary("CannotApply", "engine refused", engine="synthetic")
                record = AttemptRecord(attempt, request, outcome, Classification.CANNOT_APPLY, before=BASELINE,
                                       snapshot_id="table1")
            else:
                counts = dict(BASELINE.counts)
                if what in ("fail", "fp"):
                    for key in rng.sample(pool or [UNDEFINED_ATTRIBUTE], rng.randint(1, min(2, len(pool) or 1))):
                        counts[key] = counts.get(key, 0) + rng.randint(1, 3)
                else:
                    # correct attempts may remove errors, never add any
                    counts[MISSING_RETURN_ANNOTATION] -= rng.randint(0, 2)
                after = NormalizedReport(counts)
                refactored_id = f"table1-after-{attempt}"
                introduced = diff_reports(BASELINE, after, before_id="table1", after_id=refactored_id)
                outcome = OutcomeSummary("Applied", refactored_id=refactored_id, engine="synthetic")
                label = TriageLabel.FALSE_POSITIVE if what == "fp" else (
                    TriageLabel.CONFIRMED if what == "fail" else TriageLabel.UNREVIEWED)
                record = AttemptRecord(attempt, request, outcome, classify(outcome, introduced), BASELINE, after,
                                       introduced, label, "table1")
            records.append(record.to_dict())
    return records


def main(argv: list[str]) -> int:
    out = Path(argv[0]) if argv else Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "table1_run.jsonl.gz"
    lines = "".join(json.dumps(r, sort_keys=True) + "\n" for r in build())
    with gzip.GzipFile(out, "wb", mtime=0) as fh:
        fh.write(lines.encode("utf-8"))
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
