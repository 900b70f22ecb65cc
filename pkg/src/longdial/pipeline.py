"""Batch orchestration: corpus in, per-stage JSON artifacts out.

Stages run in a fixed order (segment, split, condense, enrich, summarize,
evaluate) and hand data to each other only through artifacts on disk under
``output_dir/<stage>/``, so any suffix of the pipeline can be rerun later
against the artifacts of an earlier invocation. Every artifact is stamped
with a hash of the effective config; a stage refuses to read or sit next
to artifacts carrying a different hash, which stops a half-old, half-new
output directory from masquerading as one consistent run.

One dialogue failing does not stop the batch: the failure is recorded in
the manifest and the remaining dialogues proceed. The manifest is written
last and is the only artifact containing timestamps, so stage artifacts
from identical configs and deterministic backends are byte-identical
across runs.
"""

from __future__ import annotations

import copy
import hashlib
import json
import logging
import os
import re
import tempfile
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from . import rouge
from .condenser import (
    Condensation,
    DEFAULT_EVENTS_TEMPLATE,
    DEFAULT_SUMMARY_TEMPLATE,
    EnrichedInput,
    PromptTemplate,
    ResponseCache,
    SplitCondensation,
    build_llm,
    condense_dialogue,
    enrich,
)
from .corpus import Corpus, Dialogue, load_corpus
from .embedder import build_embedder
from .segmenter import segment_dialogue
from .splitter import SplitPlan, split_dialogue
from .summarizer import build_summarizer

logger = logging.getLogger(__name__)

STAGES = ("segment", "split", "condense", "enrich", "summarize", "evaluate")

_SAFE_NAME_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]{0,99}")

# Keys that must not influence the config hash: they change where results
# go or how fast they arrive, never what the results are.
_VOLATILE_KEYS = ("output_dir", "cache_dir", "parallelism")


class PipelineError(RuntimeError):
    """The pipeline cannot proceed as configured."""


class MissingStageError(PipelineError):
    """A stage's required input artifacts are absent."""


def default_config() -> dict:
    return {
        "corpus_path": None,
        "output_dir": None,
        "cache_dir": None,
        "partitions": None,
        "method": "greedy",
        "w": 1,
        "l": 4,
        "M": 8,
        "budget_unit": "utterances",
        "token_budget": None,
        "k": 3,
        "stemming": False,
        "parallelism": 1,
        "embedder": {"kind": "mock-hash", "dim": 256},
        "llm": {"kind": "mock", "lines_kept": 2},
        "summarizer": {"mode": "passthrough"},
        "summary_prompt": None,
        "events_prompt": None,
    }


def load_config(path: str | Path) -> dict:
    """Read a JSON config and merge it over the defaults.

    Unknown top-level keys are rejected so typos fail loudly instead of
    silently falling back to defaults.
    """
    try:
        user = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise PipelineError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise PipelineError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(user, dict):
        raise PipelineError(f"config {path} must be a JSON object")
    merged = default_config()
    for key, value in user.items():
        if key not in merged:
            raise PipelineError(f"unknown config key {key!r}")
        if isinstance(merged[key], dict) and isinstance(value, dict):
            merged[key] = {**merged[key], **value}
        else:
            merged[key] = value
    return merged


def config_hash(config: dict) -> str:
    """Hash of the result-determining part of the config.

    Output paths, parallelism, and credentials are excluded: two runs that
    differ only in those produce identical results and must share a hash.
    """
    reduced = copy.deepcopy(config)
    for key in _VOLATILE_KEYS:
        reduced.pop(key, None)
    if isinstance(reduced.get("llm"), dict):
        reduced["llm"].pop("api_key", None)
    canonical = json.dumps(reduced, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_json(path: str | Path, payload: dict) -> None:
    """Atomic, canonical JSON write: sorted keys, two-space indent, LF."""
    path = Path(path)
    text = json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def read_json(path: str | Path) -> dict:
    try:
        record = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise PipelineError(f"cannot read artifact {path}: {exc}") from None
    if not isinstance(record, dict):
        raise PipelineError(f"artifact {path} is not a JSON object")
    return record


def _artifact_name(dialogue_id: str) -> str:
    if _SAFE_NAME_RE.fullmatch(dialogue_id):
        return f"{dialogue_id}.json"
    digest = hashlib.sha256(dialogue_id.encode("utf-8")).hexdigest()[:24]
    return f"id-{digest}.json"


class Pipeline:
    """One configured run over one corpus."""

    def __init__(self, config: dict) -> None:
        self.config = config
        self._validate()
        self.hash = config_hash(config)
        self.output_dir = Path(config["output_dir"])
        self.failures: list[dict] = []
        self._failed_ids: set[str] = set()
        self._corpus: Corpus | None = None
        self._cache: ResponseCache | None = None

    @property
    def cache(self) -> ResponseCache:
        # Created on first use so read-only entry points (exports, single
        # early stages) do not leave an empty cache directory behind.
        if self._cache is None:
            cache_dir = self.config.get("cache_dir") or self.output_dir / "cache"
            self._cache = ResponseCache(cache_dir)
        return self._cache

    def _validate(self) -> None:
        cfg = self.config
        if not cfg.get("corpus_path"):
            raise PipelineError("config needs 'corpus_path'")
        if not cfg.get("output_dir"):
            raise PipelineError("config needs 'output_dir'")
        if cfg["method"] not in ("greedy", "threshold"):
            raise PipelineError(f"unknown segmentation method {cfg['method']!r}")
        if int(cfg["w"]) < 0:
            raise PipelineError(f"w must be >= 0, got {cfg['w']}")
        if int(cfg["l"]) < 1:
            raise PipelineError(f"l must be >= 1, got {cfg['l']}")
        if int(cfg["M"]) < 1:
            raise PipelineError(f"M must be >= 1, got {cfg['M']}")
        if int(cfg["k"]) < 0:
            raise PipelineError(f"k must be >= 0, got {cfg['k']}")
        if int(cfg["parallelism"]) < 1:
            raise PipelineError(f"parallelism must be >= 1, got {cfg['parallelism']}")
        if cfg["budget_unit"] not in ("utterances", "tokens"):
            raise PipelineError(f"unknown budget unit {cfg['budget_unit']!r}")
        if cfg["budget_unit"] == "tokens" and not cfg.get("token_budget"):
            raise PipelineError("budget_unit 'tokens' needs 'token_budget'")
        partitions = cfg.get("partitions")
        if partitions is not None:
            bad = [p for p in partitions if p not in ("train", "validation", "test")]
            if bad:
                raise PipelineError(f"unknown partitions {bad}")

    # -- corpus and working set -------------------------------------------

    @property
    def corpus(self) -> Corpus:
        if self._corpus is None:
            self._corpus = load_corpus(self.config["corpus_path"])
        return self._corpus

    def working_set(self) -> list[Dialogue]:
        partitions = self.config.get("partitions")
        if partitions is None:
            return list(self.corpus)
        wanted = set(partitions)
        return [d for d in self.corpus if d.partition in wanted]

    # -- artifact plumbing -------------------------------------------------

    def _stage_dir(self, stage: str) -> Path:
        return self.output_dir / stage

    def _artifact_path(self, stage: str, dialogue_id: str) -> Path:
        return self._stage_dir(stage) / _artifact_name(dialogue_id)

    def _refuse_foreign_hashes(self, stage: str) -> None:
        directory = self._stage_dir(stage)
        if not directory.is_dir():
            return
        for path in sorted(directory.glob("*.json")):
            record = read_json(path)
            if record.get("config_hash") != self.hash:
                raise PipelineError(
                    f"{path} was produced under config hash "
                    f"{record.get('config_hash')!r}, current is {self.hash!r}; "
                    f"use a fresh output directory or remove stale artifacts"
                )

    def _write_artifact(self, stage: str, dialogue_id: str, payload: dict) -> None:
        payload = {"config_hash": self.hash, "dialogue_id": dialogue_id, **payload}
        self._stage_dir(stage).mkdir(parents=True, exist_ok=True)
        write_json(self._artifact_path(stage, dialogue_id), payload)

    def _load_stage(self, stage: str) -> dict[str, dict]:
        """All artifacts of a completed stage, indexed by dialogue id."""
        directory = self._stage_dir(stage)
        paths = sorted(directory.glob("*.json")) if directory.is_dir() else []
        paths = [p for p in paths if p.name != "report.json"]
        if not paths:
            raise MissingStageError(
                f"no {stage!r} artifacts under {directory}; run that stage first"
            )
        artifacts: dict[str, dict] = {}
        for path in paths:
            record = read_json(path)
            if record.get("config_hash") != self.hash:
                raise PipelineError(
                    f"{path} was produced under config hash "
                    f"{record.get('config_hash')!r}, current is {self.hash!r}; "
                    f"refusing to mix runs"
                )
            dialogue_id = record.get("dialogue_id")
            if not isinstance(dialogue_id, str):
                raise PipelineError(f"{path} has no dialogue_id")
            artifacts[dialogue_id] = record
        return artifacts

    def _record_failure(self, stage: str, dialogue_id: str, error: Exception | str) -> None:
        message = str(error)
        logger.warning("%s failed for %s: %s", stage, dialogue_id, message)
        self.failures.append(
            {"stage": stage, "dialogue_id": dialogue_id, "error": message}
        )
        self._failed_ids.add(dialogue_id)

    def _inputs_for(
        self, stage: str, upstream: str
    ) -> list[tuple[Dialogue, dict]]:
        """Pair working-set dialogues with their upstream artifacts.

        Dialogues that already failed this run are skipped quietly; ones
        missing an upstream artifact for any other reason are recorded as
        failures here.
        """
        artifacts = self._load_stage(upstream)
        pairs = []
        for dialogue in self.working_set():
            if dialogue.id in self._failed_ids:
                continue
            record = artifacts.get(dialogue.id)
            if record is None:
                self._record_failure(
                    stage, dialogue.id, f"missing {upstream!r} artifact"
                )
                continue
            pairs.append((dialogue, record))
        return pairs

    def _map_dialogues(self, fn, items: list) -> list:
        """Apply fn over (dialogue, payload) pairs, optionally in threads.

        Returns (dialogue, result, error) triples in input order.
        """
        workers = int(self.config["parallelism"])

        def call(item):
            dialogue = item[0]
            try:
                return (dialogue, fn(*item), None)
            except Exception as exc:
                return (dialogue, None, exc)

        if workers <= 1 or len(items) <= 1:
            return [call(item) for item in items]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(call, items))

    # -- stages --------------------------------------------------------------

    def run(self, stages: list[str] | None = None, resume: bool = False) -> dict:
        """Run the requested stages in canonical order and write a manifest.

        With resume=True, dialogues whose artifact for a stage already
        exists under the current config hash are not recomputed.
        """
        requested = list(STAGES) if stages is None else list(stages)
        unknown = [s for s in requested if s not in STAGES]
        if unknown:
            raise PipelineError(f"unknown stages {unknown}; valid: {', '.join(STAGES)}")
        ordered = [s for s in STAGES if s in requested]
        started_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
        self.output_dir.mkdir(parents=True, exist_ok=True)

        counts: dict[str, dict] = {}
        runners = {
            "segment": self._run_segment,
            "split": self._run_split,
            "condense": self._run_condense,
            "enrich": self._run_enrich,
            "summarize": self._run_summarize,
            "evaluate": self._run_evaluate,
        }
        for stage in ordered:
            self._refuse_foreign_hashes(stage)
            counts[stage] = runners[stage](resume=resume)
            logger.info("stage %s: %s", stage, counts[stage])

        manifest = {
            "config_hash": self.hash,
            "config": self._public_config(),
            "stages": counts,
            "failures": self.failures,
            "cache": {
                "hits": self._cache.hits if self._cache else 0,
                "misses": self._cache.misses if self._cache else 0,
            },
            "started_at": started_at,
            "finished_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        write_json(self.output_dir / "manifest.json", manifest)
        return manifest

    def _public_config(self) -> dict:
        public = copy.deepcopy(self.config)
        if isinstance(public.get("llm"), dict):
            public["llm"].pop("api_key", None)
        return public

    def _skip_resumable(self, stage: str, items: list, resume: bool) -> tuple[list, int]:
        if not resume:
            return items, 0
        kept = []
        reused = 0
        for item in items:
            path = self._artifact_path(stage, item[0].id)
            # Foreign hashes were refused before the stage started, so an
            # existing artifact here is guaranteed current.
            if path.exists():
                reused += 1
            else:
                kept.append(item)
        return kept, reused

    def _run_stage(self, stage: str, items: list, compute, to_payload, resume: bool) -> dict:
        items, reused = self._skip_resumable(stage, items, resume)
        written = 0
        for dialogue, result, error in self._map_dialogues(compute, items):
            if error is not None:
                self._record_failure(stage, dialogue.id, error)
                continue
            self._write_artifact(stage, dialogue.id, to_payload(result))
            written += 1
        stats = {"written": written, "reused": reused}
        if not self._stage_dir(stage).is_dir() and written == 0 and reused == 0:
            # A stage that produced nothing at all still needs its directory
            # so downstream gives a missing-stage error, not a crash.
            self._stage_dir(stage).mkdir(parents=True, exist_ok=True)
        return stats

    def _run_segment(self, resume: bool) -> dict:
        cfg = self.config
        embedder = build_embedder(cfg["embedder"])
        items = [
            (d,) for d in self.working_set() if d.id not in self._failed_ids
        ]

        def compute(dialogue: Dialogue):
            return segment_dialogue(
                dialogue,
                embedder,
                w=int(cfg["w"]),
                l=int(cfg["l"]),
                method=cfg["method"],
            )

        def to_payload(seg):
            return {
                "n": seg.n,
                "method": seg.method,
                "w": seg.w,
                "l": seg.l,
                "curve": list(seg.curve),
                "breakpoints": list(seg.breakpoints),
                "segments": [list(span) for span in seg.segments],
            }

        return self._run_stage("segment", items, compute, to_payload, resume)

    def _run_split(self, resume: bool) -> dict:
        cfg = self.config
        unit = cfg["budget_unit"]
        budget = int(cfg["M"]) if unit == "utterances" else int(cfg["token_budget"])
        items = self._inputs_for("split", "segment")

        def compute(dialogue: Dialogue, segment_record: dict):
            return split_dialogue(
                dialogue,
                [int(b) for b in segment_record["breakpoints"]],
                budget,
                budget_unit=unit,
            )

        def to_payload(plan: SplitPlan):
            return {
                "n": plan.n,
                "budget": plan.budget,
                "budget_unit": plan.budget_unit,
                "breakpoints": list(plan.breakpoints),
                "splits": [list(span) for span in plan.splits],
                "forced_cuts": list(plan.forced_cuts),
            }

        return self._run_stage("split", items, compute, to_payload, resume)

    def _run_condense(self, resume: bool) -> dict:
        cfg = self.config
        backend = build_llm(cfg["llm"])
        summary_template = _template_from(cfg.get("summary_prompt"), DEFAULT_SUMMARY_TEMPLATE)
        events_template = _template_from(cfg.get("events_prompt"), DEFAULT_EVENTS_TEMPLATE)
        items = self._inputs_for("condense", "split")

        def compute(dialogue: Dialogue, split_record: dict):
            plan = SplitPlan(
                n=int(split_record["n"]),
                budget=int(split_record["budget"]),
                budget_unit=split_record["budget_unit"],
                breakpoints=tuple(int(b) for b in split_record["breakpoints"]),
                splits=tuple((int(s), int(e)) for s, e in split_record["splits"]),
                forced_cuts=tuple(int(c) for c in split_record["forced_cuts"]),
            )
            return condense_dialogue(
                dialogue,
                plan,
                backend,
                self.cache,
                summary_template=summary_template,
                events_template=events_template,
            )

        def to_payload(result: Condensation):
            return {
                "splits": [
                    {
                        "start": s.start,
                        "end": s.end,
                        "summary": s.summary,
                        "events": s.events,
                    }
                    for s in result.splits
                ],
                "first_stage_summary": result.first_stage_summary,
                "event_list": result.event_list,
            }

        return self._run_stage("condense", items, compute, to_payload, resume)

    def _run_enrich(self, resume: bool) -> dict:
        cfg = self.config
        items = self._inputs_for("enrich", "condense")

        def compute(dialogue: Dialogue, condense_record: dict):
            condensation = Condensation(
                dialogue_id=dialogue.id,
                splits=tuple(
                    SplitCondensation(
                        start=int(s["start"]),
                        end=int(s["end"]),
                        summary=s["summary"],
                        events=s["events"],
                    )
                    for s in condense_record["splits"]
                ),
                first_stage_summary=condense_record["first_stage_summary"],
                event_list=condense_record["event_list"],
            )
            return enrich(dialogue, condensation, k=int(cfg["k"]))

        def to_payload(enriched: EnrichedInput):
            return {
                "k": enriched.k,
                "event_list": enriched.event_list,
                "first_stage_summary": enriched.first_stage_summary,
                "lead_text": enriched.lead_text,
                "text": enriched.text,
            }

        return self._run_stage("enrich", items, compute, to_payload, resume)

    def _run_summarize(self, resume: bool) -> dict:
        cfg = self.config
        llm_backend = build_llm(cfg["llm"]) if cfg["summarizer"].get("mode") == "llm" else None
        summarizer = build_summarizer(cfg["summarizer"], llm_backend, self.cache)
        items = self._inputs_for("summarize", "enrich")

        def compute(dialogue: Dialogue, enrich_record: dict):
            enriched = EnrichedInput(
                dialogue_id=dialogue.id,
                k=int(enrich_record["k"]),
                event_list=enrich_record["event_list"],
                first_stage_summary=enrich_record["first_stage_summary"],
                lead_text=enrich_record["lead_text"],
                text=enrich_record["text"],
            )
            return {"mode": summarizer.mode, "summary": summarizer.summarize(enriched)}

        return self._run_stage("summarize", items, compute, lambda r: r, resume)

    def _run_evaluate(self, resume: bool) -> dict:
        del resume  # scoring is cheap and the report covers the whole set
        stemming = bool(self.config["stemming"])
        artifacts = self._load_stage("summarize")
        evaluated: list[str] = []
        skipped: list[dict] = []
        per_dialogue: dict[str, dict] = {}
        pair_scores = []
        for dialogue in self.working_set():
            record = artifacts.get(dialogue.id)
            if record is None:
                skipped.append(
                    {"dialogue_id": dialogue.id, "reason": "no generated summary"}
                )
                continue
            if not dialogue.gold_summary:
                skipped.append(
                    {"dialogue_id": dialogue.id, "reason": "no gold summary"}
                )
                continue
            scores = rouge.score(record["summary"], dialogue.gold_summary, stemming=stemming)
            pair_scores.append(scores)
            evaluated.append(dialogue.id)
            per_dialogue[dialogue.id] = {
                metric: rouge.score_to_dict(s) for metric, s in scores.items()
            }
            self._write_artifact(
                "evaluate", dialogue.id, per_dialogue[dialogue.id]
            )
        aggregate = (
            {
                metric: rouge.score_to_dict(s)
                for metric, s in rouge.aggregate(pair_scores).items()
            }
            if pair_scores
            else None
        )
        report = {
            "config_hash": self.hash,
            "stemming": stemming,
            "evaluated": evaluated,
            "skipped": skipped,
            "aggregate": aggregate,
            "per_dialogue": per_dialogue,
        }
        self._stage_dir("evaluate").mkdir(parents=True, exist_ok=True)
        write_json(self._stage_dir("evaluate") / "report.json", report)
        return {"evaluated": len(evaluated), "skipped": len(skipped)}


def _template_from(block: dict | None, default: PromptTemplate) -> PromptTemplate:
    if block is None:
        return default
    try:
        return PromptTemplate(
            name=block["name"],
            template=block["template"],
            version=str(block.get("version", "1")),
        )
    except (KeyError, TypeError) as exc:
        raise PipelineError(f"prompt template config needs 'name' and 'template': {exc}") from None


def run_pipeline(config: dict, stages: list[str] | None = None, resume: bool = False) -> dict:
    """Convenience wrapper: build a Pipeline and run it."""
    return Pipeline(config).run(stages=stages, resume=resume)


def export_training_file(
    config: dict,
    output_path: str | Path,
    partitions: list[str] | None = None,
) -> int:
    """Write enriched-input/gold-summary pairs as JSONL training data.

    One line per dialogue that has both an enrich artifact and a gold
    summary: {"id", "partition", "input", "target"}. Returns the number of
    lines written. Downstream consumers do their own partition filtering;
    the optional filter here just narrows the export.
    """
    pipeline = Pipeline(config)
    artifacts = pipeline._load_stage("enrich")
    wanted = set(partitions) if partitions is not None else None
    rows = []
    for dialogue in pipeline.working_set():
        if wanted is not None and dialogue.partition not in wanted:
            continue
        record = artifacts.get(dialogue.id)
        if record is None or not dialogue.gold_summary:
            continue
        rows.append(
            {
                "id": dialogue.id,
                "partition": dialogue.partition,
                "input": record["text"],
                "target": dialogue.gold_summary,
            }
        )
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with output_path.open("w", encoding="utf-8", newline="\n") as handle:
        for row in rows:
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")
    return len(rows)
