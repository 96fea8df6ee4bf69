"""``ergowalk`` command line: run, validate and report experiment scenarios.

Exit codes: 0 success (whatever the mathematical verdict), 2 invalid
configuration, 3 scenario failure (the manifest lists partial outputs).
"""

import argparse
import dataclasses
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from ergowalk.cli.build import build_profile, build_system
from ergowalk.cli.config import load_config, parse_config
from ergowalk.cli.manifest import MANIFEST_NAME, RunManifest, print_report
from ergowalk.cli.scenarios import SCENARIO_RUNNERS, RunContext
from ergowalk.errors import ConfigError, ScenarioFailure
from ergowalk.walk.simulate import default_threads

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAILURE = 3


def run_scenario(config, out_dir, master_seed=None, threads=None):
    """Execute the configured scenario under ``out_dir/<scenario>/<timestamp>-<seed>/``.

    ``config`` is a RunConfig or a decoded JSON document.  Returns the
    written RunManifest; raises ConfigError before anything is written and
    ScenarioFailure (carrying the partial manifest) when the run breaks.
    """
    if isinstance(config, dict):
        config = parse_config(config, master_seed)
    elif master_seed is not None:
        config = dataclasses.replace(config, seed=int(master_seed))
    threads = threads or default_threads()
    system = build_system(config)
    profile = build_profile(system, config)

    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
    run_dir = Path(out_dir) / config.scenario.name / f"{stamp}-{config.seed}"
    run_dir.mkdir(parents=True, exist_ok=False)
    manifest = RunManifest(
        config=config.to_record(),
        seed=config.seed,
        scenario=config.scenario.name,
        created=stamp,
        threads=threads,
    )
    manifest.summary["system"] = system.describe()
    manifest.summary["profile"] = profile.describe()
    ctx = RunContext(config, system, profile, run_dir, manifest, threads)
    logger.info("running %s into %s", config.scenario.name, run_dir)
    try:
        verdict, summary = SCENARIO_RUNNERS[config.scenario.name](ctx)
    except Exception as exc:
        manifest.status = "failed"
        manifest.error = f"{type(exc).__name__}: {exc}"
        manifest.write(run_dir)
        logger.error("scenario %s failed: %s", config.scenario.name, exc)
        raise ScenarioFailure(manifest.error, manifest) from exc
    manifest.status = "ok"
    manifest.verdict = verdict
    manifest.summary.update(summary)
    path = manifest.write(run_dir)
    logger.info("manifest written to %s (verdict: %s)", path, verdict)
    return manifest


def build_parser():
    parser = argparse.ArgumentParser(prog="ergowalk", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write its artifacts")
    run.add_argument("--config", required=True, help="JSON experiment config")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="master seed (overrides the config)")
    run.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: $ERGOWALK_THREADS or available cores)")

    validate = sub.add_parser("validate", help="check a config without running it")
    validate.add_argument("--config", required=True)

    report = sub.add_parser("report", help="pretty-print a run manifest")
    report.add_argument("--manifest", required=True)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "validate":
            config = load_config(args.config)
            build_profile(build_system(config), config)
            print(f"{args.config}: valid {config.scenario.name} config")
            return EXIT_OK
        if args.command == "report":
            path = Path(args.manifest)
            if path.is_dir():
                path = path / MANIFEST_NAME
            manifest = RunManifest.load(path)
            intact = print_report(manifest, path.parent)
            return EXIT_OK if intact else EXIT_FAILURE
        if args.threads is not None and args.threads < 1:
            raise ConfigError(f"--threads must be positive, got {args.threads}")
        config = load_config(args.config, args.seed)
        manifest = run_scenario(config, args.out, threads=args.threads)
        print(f"{manifest.scenario}: {manifest.verdict}")
        return EXIT_OK
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    except ScenarioFailure as exc:
        logger.error("%s", exc)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
