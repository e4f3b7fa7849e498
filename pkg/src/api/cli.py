"""
Командная строка:

    python -m src.api.cli compute --preset L_{4,3} --eps --format json
    python -m src.api.cli corpus --dim 5 --jobs 4 --report data/reports/dim5.csv
    python -m src.api.cli check "s/(s-1)" --derived-dim 1
    python -m src.api.cli list-presets

Коды выхода: 0 - успех, 1 - ошибка ввода или несовпадение в корпусе,
2 - редукция не удалась.
"""
import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from src.analysis.corpus import (
    DEFAULT_CORPUS_PATH,
    CorpusRunner,
    export_report,
    filter_entries,
    load_corpus,
    omega_ratios,
    passed,
    summarize,
)
from src.analysis.engine import EngineConfig, check_invariants, topological_rep_zeta
from src.analysis.lie import NilpotentLieAlgebra, dual_number_extension, validate
from src.core.config import ORACLE_MODES, Settings, load_settings
from src.core.data_manager import ResultManager
from src.core.exact import format_rational, parse_ratfun
from src.core.exceptions import AlgebraParseError, AlgebraValidationError, ReductionFailure
from src.data_ingestion.json_algebra_file import parse_algebra_file
from src.data_ingestion.preset_catalog import PresetCatalog

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_REDUCTION = 2

INPUT_ERRORS = (AlgebraParseError, AlgebraValidationError, KeyError, ValueError, OSError)


def _engine_config(args, settings: Settings, trace: bool = False) -> EngineConfig:
    return EngineConfig.from_settings(settings, depth_bound=args.depth, oracle_mode=args.oracle,
                                      jobs=args.jobs, trace=trace or None)


def _load_algebra(args) -> NilpotentLieAlgebra:
    if args.input:
        algebra = parse_algebra_file(args.input)
    else:
        algebra = PresetCatalog().fetch_algebra(args.preset)
    for _ in range(args.eps):
        algebra = validate(dual_number_extension(algebra))
    return algebra


def _write_trace(path: str, records: list) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, default=str) + "\n")
    logger.info(f"Trace with {len(records)} events written to {path}")


def cmd_compute(args, settings: Settings) -> int:
    try:
        algebra = _load_algebra(args)
        config = _engine_config(args, settings, trace=bool(args.trace))
    except INPUT_ERRORS as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INPUT
    try:
        if args.cache and not args.trace:
            result = ResultManager(config, settings.cache_dir).get_result(algebra)
        else:
            result = topological_rep_zeta(algebra, config)
    except ReductionFailure as e:
        logger.error(f"Reduction failed for {algebra.name}: {e} (depth {e.depth})")
        return EXIT_REDUCTION

    if args.trace:
        _write_trace(args.trace, result.trace)
    if args.format == "json":
        print(json.dumps(result.to_json()))
    elif args.format == "latex":
        print(result.zeta.to_latex())
    else:
        print(result.zeta.to_plain())
        print(f"omega = {format_rational(result.omega)}")
        print(f"weight = {result.weight}")
        print(f"time = {result.seconds:.2f}s")
    return EXIT_OK


def cmd_corpus(args, settings: Settings) -> int:
    try:
        entries = filter_entries(load_corpus(args.corpus), name=args.filter, dim=args.dim,
                                 weight=args.weight, include_slow=args.slow)
        config = _engine_config(args, settings)
    except INPUT_ERRORS as e:
        logger.error(f"Cannot load corpus {args.corpus}: {e}")
        return EXIT_INPUT
    if not entries:
        logger.warning("No corpus entries match the filter")
        return EXIT_OK

    runner = CorpusRunner(config, jobs=config.jobs, cache_dir=settings.cache_dir if args.cache else None)
    report = runner.run(entries)
    print(report.to_string(index=False))
    print()
    print(summarize(report, by="dim").to_string())
    ratios = omega_ratios(report)
    if not ratios.empty:
        print()
        print(ratios.to_string(index=False))
    if args.report:
        export_report(report, args.report)

    for row in report[~report["status"].isin(["pass", "reference"])].itertuples():
        print(f"{row.name}: {row.status}; expected {row.expected}, computed {row.computed}", file=sys.stderr)
    return EXIT_OK if passed(report) else EXIT_INPUT


def cmd_check(args, settings: Settings) -> int:
    try:
        if args.preset or args.input:
            algebra = _load_algebra(args)
            zeta = topological_rep_zeta(algebra, _engine_config(args, settings)).zeta
            derived_dim, dim = algebra.derived_dim, algebra.dim
        else:
            if args.zeta is None or args.derived_dim is None:
                raise ValueError("Нужны функция и --derived-dim (или --preset/--input)")
            zeta = parse_ratfun(args.zeta)
            derived_dim, dim = args.derived_dim, args.dim
    except INPUT_ERRORS as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_INPUT
    except ReductionFailure as e:
        logger.error(f"Reduction failed: {e}")
        return EXIT_REDUCTION

    report = check_invariants(zeta, derived_dim, dim, strict=False)
    print(zeta.to_plain())
    for failure in report.failures:
        print(f"FAIL {failure}")
    for key, value in report.observations.items():
        print(f"{key}: {value}")
    return EXIT_OK if report.ok else EXIT_INPUT


def cmd_list_presets(args, settings: Settings) -> int:
    catalog = PresetCatalog()
    for name in catalog.get_available_names():
        info = catalog.get_info(name)
        alias = f" (= {info['alias_of']})" if "alias_of" in info else ""
        print(f"{name}\tdim={info['dim']}\tderived={info['derived_dim']}\tclass={info['class']}{alias}")
    return EXIT_OK


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--depth", type=int, default=None, help="граница глубины редукции")
    parser.add_argument("--oracle", choices=ORACLE_MODES, default=None, help="режим оракула χ")
    parser.add_argument("--jobs", type=int, default=None, help="число процессов")
    parser.add_argument("--cache", action=argparse.BooleanOptionalAction, default=False,
                        help="использовать Parquet-кэш результатов")


def _add_algebra_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    source = parser.add_mutually_exclusive_group(required=required)
    source.add_argument("--input", help="JSON-файл алгебры")
    source.add_argument("--preset", help="имя или выражение каталога")
    parser.add_argument("--eps", action="count", default=0, help="расширение двойственными числами (повторяемо)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zeta", description="Топологические дзета-функции представлений")
    parser.add_argument("--env", default=None, help="путь к .env файлу")
    subparsers = parser.add_subparsers(dest="command", required=True)

    compute = subparsers.add_parser("compute", help="вычислить ζ_top одной алгебры")
    _add_algebra_flags(compute, required=True)
    _add_engine_flags(compute)
    compute.add_argument("--format", choices=("plain", "latex", "json"), default="plain")
    compute.add_argument("--trace", default=None, help="файл журнала событий (JSON lines)")
    compute.set_defaults(handler=cmd_compute)

    corpus = subparsers.add_parser("corpus", help="прогнать регрессионный корпус")
    corpus.add_argument("--corpus", default=DEFAULT_CORPUS_PATH)
    corpus.add_argument("--filter", default=None, help="подстрока имени")
    corpus.add_argument("--dim", type=int, default=None)
    corpus.add_argument("--weight", type=int, default=None)
    corpus.add_argument("--slow", action="store_true", help="включить тяжёлые строки")
    corpus.add_argument("--report", default=None, help="CSV или Parquet файл отчёта")
    _add_engine_flags(corpus)
    corpus.set_defaults(handler=cmd_corpus)

    check = subparsers.add_parser("check", help="проверить инварианты рациональной функции")
    check.add_argument("zeta", nargs="?", default=None)
    check.add_argument("--derived-dim", type=int, default=None)
    check.add_argument("--dim", type=int, default=None)
    _add_algebra_flags(check, required=False)
    _add_engine_flags(check)
    check.set_defaults(handler=cmd_check)

    presets = subparsers.add_parser("list-presets", help="показать каталог")
    presets.set_defaults(handler=cmd_list_presets)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(args.env)
    except ValueError as e:
        print(f"Некорректные настройки окружения: {e}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=getattr(logging, settings.log_level, logging.INFO),
                        format='%(asctime)s - %(levelname)s - %(name)s - %(message)s')
    return args.handler(args, settings)


if __name__ == '__main__':
    sys.exit(main())
