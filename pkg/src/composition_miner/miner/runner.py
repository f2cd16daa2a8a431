"""Mine a list of entities and write trees, quarantines and the audit log."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from ..kbstore import save_entity
from ..kbmodel import normalize_name
from .jobs import MiningResult

logger = logging.getLogger(__name__)


@dataclass
class MiningSummary:
    results: list[MiningResult] = field(default_factory=list)

    @property
    def mined(self) -> int:
        return sum(1 for r in self.results if r.tree is not None)

    @property
    def quarantined(self) -> int:
        return sum(1 for r in self.results if r.quarantines)

    @property
    def flagged(self) -> int:
        return sum(1 for r in self.results if r.flags)


def _quarantine_path(directory: Path, entity: str, stage: str) -> Path:
    safe_entity = normalize_name(entity).replace("/", "_")
    safe_stage = stage.replace("/", "_")
    path = directory / safe_entity
    path.mkdir(parents=True, exist_ok=True)
    return path / f"{safe_stage}.txt"


def write_result(
    result: MiningResult,
    kb_dir: str | Path,
    quarantine_dir: str | Path,
) -> None:
    if result.tree is not None:
        save_entity(result.tree, kb_dir)
    for record in result.quarantines:
        path = _quarantine_path(Path(quarantine_dir), result.entity, record.stage)
        path.write_text(
            f"# reason: {record.reason}\n{record.text}\n", encoding="utf-8"
        )


def mine_entities(
    entities: Sequence[str],
    mine_one: Callable[[str], MiningResult],
    *,
    kb_dir: str | Path,
    quarantine_dir: str | Path,
    audit_path: str | Path | None = None,
    jobs: int = 1,
) -> MiningSummary:
    """Mine every entity (optionally on a worker pool) and persist outputs.

    Entities are independent; within one entity the prompts stay strictly
    sequential inside ``mine_one``. Results are written in input order so
    reruns produce identical files.
    """
    summary = MiningSummary()
    if jobs <= 1:
        results = [mine_one(name) for name in entities]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(mine_one, entities))
    for result in results:
        summary.results.append(result)
        write_result(result, kb_dir, quarantine_dir)
        if result.quarantines:
            logger.warning(
                "%s: quarantined (%s)",
                result.entity,
                "; ".join(q.reason for q in result.quarantines),
            )
    if audit_path is not None:
        with open(audit_path, "w", encoding="utf-8") as handle:
            for result in results:
                handle.write(
                    json.dumps(
                        {
                            "entity": result.entity,
                            "prompts_used": result.prompts_used,
                            "branches": result.audit,
                            "flags": result.flags,
                            "quarantined": bool(result.quarantines),
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
    return summary
