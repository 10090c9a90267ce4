"""Pipeline orchestration for the match, generate, evaluate and sweep commands."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from historical_record_linker.cluster import find_veto_conflicts, link_corpus
from historical_record_linker.corpus_io import (
    ensure_dir,
    load_corpus,
    load_sets,
    load_truth,
    write_results,
)
from historical_record_linker.errors import LinkageError, ResultWriteError
from historical_record_linker.evaluation import score, sweep, write_sweep
from historical_record_linker.generator import GenParams, generate_corpus
from historical_record_linker.model import Corpus, MatchConfig

logger = logging.getLogger(__name__)

# Constants
OUTPUT_DIR = Path("output")
SWEEP_FILENAME = "sweep.csv"


def read_corpus(
    events_file: str,
    persons_file: str,
    aliases_file: Optional[str] = None,
    role_map_file: Optional[str] = None,
):
    """Load the corpus together with its optional alias table and role map."""
    return load_corpus(events_file, persons_file, aliases=aliases_file, role_map=role_map_file)


def _failed(command: str, target: Any, error: Exception) -> Dict[str, Any]:
    logger.error(f"{command} failed for '{target}': {error}")
    return {'command': command, 'target': str(target), 'status': 'failed', 'error': str(error)}


def run_match(
    events_file: str,
    persons_file: str,
    config: MatchConfig,
    output_dir: Path = OUTPUT_DIR,
    aliases_file: Optional[str] = None,
    role_map_file: Optional[str] = None,
    jobs: int = 1,
) -> Dict[str, Any]:
    """Ingest, index, match and cluster a corpus, then write the record sets."""
    logger.info(f"Matching corpus: {events_file} + {persons_file}")
    try:
        corpus, report = read_corpus(events_file, persons_file, aliases_file, role_map_file)
        result = link_corpus(corpus, config, jobs=jobs)
        conflicts = find_veto_conflicts(result.sets, corpus, config) if config.explain else None
        written = write_results(
            result.sets,
            corpus,
            output_dir,
            decisions=result.decisions if config.explain else None,
            conflicts=conflicts,
        )
    except LinkageError as e:
        return _failed('match', events_file, e)

    linked = sum(1 for s in result.sets if len(s) > 1)
    logger.info(f"Successfully matched corpus: {len(result.sets)} set(s), {linked} with more than one record")
    return {
        'command': 'match',
        'target': str(output_dir),
        'status': 'success',
        'records': len(corpus),
        'quarantined': len(report.quarantined),
        'groups': len(result.groups),
        'sets': len(result.sets),
        'conflicts': len(conflicts) if conflicts is not None else None,
        'output_files': [str(p) for p in written],
    }


def run_generate(params: GenParams, output_dir: Path = OUTPUT_DIR) -> Dict[str, Any]:
    """Write a synthetic corpus and its truth file."""
    logger.info(f"Generating corpus of {params.n_individuals} individual(s) with seed {params.seed}")
    try:
        files = generate_corpus(params, output_dir)
    except LinkageError as e:
        return _failed('generate', output_dir, e)

    return {
        'command': 'generate',
        'target': str(output_dir),
        'status': 'success',
        'output_files': [str(files.events), str(files.persons), str(files.truth), str(files.aliases)],
    }


def run_evaluate(
    sets_file: str,
    truth_file: str,
    events_file: Optional[str] = None,
    persons_file: Optional[str] = None,
    aliases_file: Optional[str] = None,
    role_map_file: Optional[str] = None,
    output_file: Optional[Path] = None,
) -> Dict[str, Any]:
    """
    Score a sets.csv against a truth file.

    With the corpus files the report adds error categories and per-event-type
    precision.
    """
    logger.info(f"Evaluating {sets_file} against {truth_file}")
    try:
        sets = load_sets(sets_file)
        truth = load_truth(truth_file)
        corpus: Optional[Corpus] = None
        if events_file and persons_file:
            corpus, _ = read_corpus(events_file, persons_file, aliases_file, role_map_file)
        report = score(sets, truth, corpus)
        written = []
        if output_file:
            output_file = Path(output_file)
            ensure_dir(output_file.parent)
            try:
                output_file.write_text(json.dumps(report.as_dict(), indent=2) + "\n", encoding="utf-8")
            except OSError as e:
                raise ResultWriteError(str(output_file), str(e))
            logger.info(f"Saved output to: {output_file}")
            written.append(str(output_file))
    except LinkageError as e:
        return _failed('evaluate', sets_file, e)

    return {
        'command': 'evaluate',
        'target': sets_file,
        'status': 'success',
        'report': report,
        'output_files': written,
    }


def run_sweep(
    events_file: str,
    persons_file: str,
    truth_file: str,
    ranges: Dict[str, Sequence[Any]],
    base_config: MatchConfig,
    output_file: Path = OUTPUT_DIR / SWEEP_FILENAME,
    aliases_file: Optional[str] = None,
    role_map_file: Optional[str] = None,
    jobs: int = 1,
) -> Dict[str, Any]:
    """Score every point of a configuration grid on one corpus."""
    try:
        corpus, _ = read_corpus(events_file, persons_file, aliases_file, role_map_file)
        truth = load_truth(truth_file)
        rows = sweep(ranges, corpus, truth, base_config, jobs=jobs)
        write_sweep(rows, output_file)
    except LinkageError as e:
        return _failed('sweep', events_file, e)

    return {
        'command': 'sweep',
        'target': str(output_file),
        'status': 'success',
        'rows': rows,
        'output_files': [str(output_file)],
    }


def _report_lines(report) -> List[str]:
    recall = "n/a" if report.recall is None else f"{report.recall:.4f}"
    lines = [
        f"   Pairs predicted: {report.pairs_predicted} "
        f"(true {report.true_matches}, false {report.false_matches})",
        f"   Precision: {report.precision:.4f} | Recall: {recall}",
    ]
    for category, count in report.error_categories.items():
        lines.append(f"   {category}: {count}")
    for kind, stats in report.by_event_type.items():
        lines.append(f"   {kind}: precision {stats['precision']:.4f} over {stats['pairs_predicted']} pair(s)")
    return lines


def print_summary(results: List[Dict[str, Any]]) -> None:
    """Print a summary of all commands run."""
    logger.info("=" * 80)
    logger.info("SUMMARY")
    logger.info("=" * 80)

    successful = 0
    failed = 0

    for i, result in enumerate(results, 1):
        status_symbol = "✓" if result['status'] == 'success' else "✗"
        logger.info(f"\n{i}. {status_symbol} {result['command']}: {result['target']}")

        if result['status'] == 'success':
            successful += 1
            if 'sets' in result:
                logger.info(
                    f"   Records: {result['records']} | Quarantined: {result['quarantined']} | "
                    f"Groups: {result['groups']} | Sets: {result['sets']}"
                )
            if result.get('conflicts'):
                logger.info(f"   Veto conflicts inside sets: {result['conflicts']}")
            if 'report' in result:
                for line in _report_lines(result['report']):
                    logger.info(line)
            if 'rows' in result:
                logger.info(f"   Configuration points: {len(result['rows'])}")
            for path in result.get('output_files', []):
                logger.info(f"   Output: {path}")
        else:
            failed += 1
            logger.info(f"   Error: {result.get('error', 'Unknown error')}")

    logger.info("\n" + "=" * 80)
    logger.info(f"Total: {len(results)} | Successful: {successful} | Failed: {failed}")
    logger.info("=" * 80)
