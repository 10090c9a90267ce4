"""Command-line interface for the historical record linker."""

import sys
import logging
import argparse
from pathlib import Path
from typing import Any, Dict, List, Optional
from dotenv import load_dotenv

from historical_record_linker.config import (
    build_match_config,
    default_config_path,
    default_log_file,
    load_config,
    resolve_input,
    resolve_jobs,
)
from historical_record_linker.core import (
    run_match,
    run_generate,
    run_evaluate,
    run_sweep,
    print_summary,
    OUTPUT_DIR,
    SWEEP_FILENAME,
)
from historical_record_linker.errors import LinkageError
from historical_record_linker.generator import GenParams
from historical_record_linker import __version__


def setup_logging(verbose: bool = False, log_file: Optional[str] = None) -> None:
    """Configure logging based on CLI arguments."""
    log_level = logging.DEBUG if verbose else logging.INFO

    handlers = [logging.StreamHandler(sys.stdout)]

    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers
    )


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '-c', '--config',
        type=str,
        help='Path to YAML configuration file (default: $HRL_CONFIG)'
    )
    common.add_argument(
        '-v', '--verbose',
        action='store_true',
        help='Enable verbose logging (DEBUG level)'
    )
    common.add_argument(
        '--log-file',
        type=str,
        default=None,
        help='Log file path (default: $HRL_LOG_FILE, else no log file)'
    )
    return common


def _corpus_options(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument('--events', type=str, required=required, help='events.csv path')
    parser.add_argument('--persons', type=str, required=required, help='persons.csv path')
    parser.add_argument('--aliases', type=str, help='Location alias table (alias,canonical)')
    parser.add_argument('--role-map', type=str, help='Role label mapping (source_label,canonical_role)')


def _matching_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        '--require-relationships',
        action='store_true',
        default=None,
        help='Require shared event participants for a match'
    )
    parser.add_argument('--rules', type=str, help='Role ruleset JSON file (default: built-in R1-R5)')
    parser.add_argument(
        '--jobs',
        type=int,
        default=None,
        help='Worker threads (default: config file, then $HRL_JOBS, then 1); never changes output'
    )


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    common = _common_options()
    parser = argparse.ArgumentParser(
        description='Link person mentions across historical sacramental records',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Generate a synthetic corpus with ground truth
  hrl generate --individuals 1000 --typo-rate 0.05 --seed 7 --output ./corpus

  # Link the records, keeping every pairwise decision
  hrl match --events ./corpus/events.csv --persons ./corpus/persons.csv \\
      --aliases ./corpus/aliases.csv --output ./linked --explain

  # Score the record sets
  hrl evaluate --sets ./linked/sets.csv --truth ./corpus/truth.csv

  # Sweep thresholds
  hrl sweep --events ./corpus/events.csv --persons ./corpus/persons.csv \\
      --truth ./corpus/truth.csv --name-threshold 0.85 0.9 0.95 --window-years 1 5 20
        """
    )

    parser.add_argument(
        '--version',
        action='version',
        version=f'historical-record-linker {__version__}'
    )
    commands = parser.add_subparsers(dest='command', required=True)

    match = commands.add_parser('match', parents=[common], help='Link a corpus into record sets')
    _corpus_options(match)
    _matching_options(match)
    match.add_argument('--window-years', type=int, help='Maximum year gap between matching mentions (default: 5)')
    match.add_argument('--name-threshold', type=float, help='Minimum name similarity (default: 0.92)')
    match.add_argument('--location-threshold', type=float, help='Minimum location similarity (default: 0.80)')
    match.add_argument('--name-metric', choices=['jaro_winkler', 'normalized_edit'], help='Name similarity metric')
    match.add_argument('--fuzzy-keys', action='store_true', default=None, help='Merge near-identical name keys when indexing')
    match.add_argument('--explain', action='store_true', help='Also write decisions.csv and conflicts.csv')
    match.add_argument(
        '-o', '--output',
        type=str,
        default=str(OUTPUT_DIR),
        help=f'Output directory path (default: {OUTPUT_DIR})'
    )

    generate = commands.add_parser('generate', parents=[common], help='Write a synthetic corpus with ground truth')
    generate.add_argument('--individuals', type=int, default=1000, help='Number of individuals (default: 1000)')
    generate.add_argument('--families', type=int, help='Number of lineages (default: one per 20 individuals)')
    generate.add_argument(
        '--events-per-individual',
        type=int,
        nargs=2,
        metavar=('MIN', 'MAX'),
        default=[2, 6],
        help='Events per married couple (default: 2 6)'
    )
    generate.add_argument('--typo-rate', type=float, default=0.0, help='Probability of a typo per name mention')
    generate.add_argument('--alias-rate', type=float, default=0.0, help='Probability of an alias location form')
    generate.add_argument('--date-jitter', type=int, default=0, help='Recorded year jitter in years')
    generate.add_argument('--duplicate-name-rate', type=float, default=0.0, help='Probability a first son shares his father\'s name')
    generate.add_argument('--locations', type=int, default=40, help='Number of parishes (default: 40)')
    generate.add_argument('--death-rate', type=float, default=0.5, help='Probability a spouse has a burial record')
    generate.add_argument('--marriage-rate', type=float, default=0.6, help='Probability a son marries and founds a household')
    generate.add_argument('--generations', type=int, default=2, help='Household generations (default: 2)')
    generate.add_argument('--max-span-years', type=int, help='Cap on the years a household\'s records span')
    generate.add_argument('--seed', type=int, default=0, help='Random seed (default: 0)')
    generate.add_argument(
        '-o', '--output',
        type=str,
        default=str(OUTPUT_DIR),
        help=f'Output directory path (default: {OUTPUT_DIR})'
    )

    evaluate = commands.add_parser('evaluate', parents=[common], help='Score record sets against ground truth')
    evaluate.add_argument('--sets', type=str, required=True, help='sets.csv written by match')
    evaluate.add_argument('--truth', type=str, required=True, help='truth.csv (record_id,individual_id)')
    _corpus_options(evaluate, required=False)
    evaluate.add_argument('-o', '--output', type=str, help='Write the report as JSON to this path')

    sweep = commands.add_parser('sweep', parents=[common], help='Score a grid of matching configurations')
    _corpus_options(sweep)
    _matching_options(sweep)
    sweep.add_argument('--truth', type=str, required=True, help='truth.csv (record_id,individual_id)')
    sweep.add_argument('--window-years', type=int, nargs='+', help='Window values to try')
    sweep.add_argument('--name-threshold', type=float, nargs='+', help='Name thresholds to try')
    sweep.add_argument('--location-threshold', type=float, nargs='+', help='Location thresholds to try')
    sweep.add_argument('--min-relationship-support', type=int, nargs='+', help='Relationship minimums to try')
    sweep.add_argument(
        '-o', '--output',
        type=str,
        default=str(OUTPUT_DIR / SWEEP_FILENAME),
        help=f'Sweep CSV path (default: {OUTPUT_DIR / SWEEP_FILENAME})'
    )

    args = parser.parse_args(argv)

    if args.command == 'sweep':
        if not any(getattr(args, name) for name in ('window_years', 'name_threshold',
                                                     'location_threshold', 'min_relationship_support')):
            sweep.error("sweep needs at least one parameter range")
    if args.command == 'evaluate' and bool(args.events) != bool(args.persons):
        evaluate.error("--events and --persons must be given together")

    return args


def _sweep_ranges(args: argparse.Namespace) -> Dict[str, List[Any]]:
    names = ('window_years', 'name_threshold', 'location_threshold', 'min_relationship_support')
    return {name: getattr(args, name) for name in names if getattr(args, name)}


def dispatch(args: argparse.Namespace, config: Dict[str, Any]) -> Dict[str, Any]:
    """Run the selected command and return its status dict."""
    if args.command == 'generate':
        params = GenParams(
            n_individuals=args.individuals,
            families=args.families,
            events_per_individual=tuple(args.events_per_individual),
            typo_rate=args.typo_rate,
            location_alias_rate=args.alias_rate,
            date_jitter_years=args.date_jitter,
            duplicate_name_rate=args.duplicate_name_rate,
            seed=args.seed,
            n_locations=args.locations,
            death_rate=args.death_rate,
            marriage_rate=args.marriage_rate,
            generations=args.generations,
            max_span_years=args.max_span_years,
        )
        return run_generate(params, Path(args.output))

    aliases = resolve_input('aliases', args.aliases, config)
    role_map = resolve_input('role_map', args.role_map, config)

    if args.command == 'evaluate':
        return run_evaluate(
            args.sets, args.truth, args.events, args.persons, aliases, role_map,
            Path(args.output) if args.output else None,
        )

    jobs = resolve_jobs(args.jobs, config)

    if args.command == 'match':
        match_config = build_match_config(
            config,
            rules_file=args.rules,
            window_years=args.window_years,
            name_threshold=args.name_threshold,
            location_threshold=args.location_threshold,
            name_metric=args.name_metric,
            relationship_required=args.require_relationships,
            fuzzy_keys=args.fuzzy_keys,
            explain=args.explain or None,
        )
        return run_match(args.events, args.persons, match_config, Path(args.output), aliases, role_map, jobs)

    base_config = build_match_config(
        config, rules_file=args.rules, relationship_required=args.require_relationships
    )
    return run_sweep(
        args.events, args.persons, args.truth, _sweep_ranges(args), base_config,
        Path(args.output), aliases, role_map, jobs,
    )


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point."""
    try:
        # Load environment variables
        load_dotenv()

        # Parse arguments
        args = parse_arguments(argv)

        # Setup logging
        setup_logging(args.verbose, args.log_file or default_log_file())
        logger = logging.getLogger(__name__)

        logger.info(f"Historical Record Linker v{__version__}")

        config: Dict[str, Any] = {}
        config_path = args.config or default_config_path()
        if config_path:
            logger.info(f"Loading configuration from: {config_path}")
            config = load_config(config_path)
            if config is None:
                logger.error("Failed to load valid configuration. Exiting.")
                return 1

        result = dispatch(args, config)

        # Print summary
        print_summary([result])

        if result['status'] == 'failed':
            logger.warning(f"Command '{args.command}' failed")
            return 1

        logger.info(f"Command '{args.command}' completed successfully")
        return 0

    except KeyboardInterrupt:
        logger = logging.getLogger(__name__)
        logger.warning("Process interrupted by user")
        return 130

    except LinkageError as e:
        logger = logging.getLogger(__name__)
        logger.error(f"{e}")
        return 1

    except Exception as e:
        logger = logging.getLogger(__name__)
        logger.error(f"Unexpected error in main execution: {e}", exc_info=True)
        return 1


if __name__ == '__main__':
    sys.exit(main())
