import json
import platform
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from ergowalk.cli.io import sha256_file, write_json
from ergowalk.errors import ConfigError

MANIFEST_NAME = "manifest.json"
TRACKED_PACKAGES = ("ergowalk", "numpy", "scipy", "gymnasium", "rich")


def package_versions():
    versions = {"python": platform.python_version()}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


@dataclass
class RunManifest:
    """Config echo, versions, stage timings, artifact digests and the verdict of one run."""

    config: dict
    seed: int
    scenario: str
    created: str
    threads: int = 1
    versions: dict = field(default_factory=package_versions)
    status: str = "running"
    verdict: str = None
    summary: dict = field(default_factory=dict)
    stages: list = field(default_factory=list)
    files: list = field(default_factory=list)
    error: str = None

    def add_file(self, run_dir, name):
        path = Path(run_dir) / name
        self.files.append({"path": name, "sha256": sha256_file(path), "bytes": path.stat().st_size})

    def digests(self):
        return {f["path"]: f["sha256"] for f in self.files}

    def to_record(self):
        return asdict(self)

    def write(self, run_dir):
        path = Path(run_dir) / MANIFEST_NAME
        write_json(path, self.to_record())
        return path

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                record = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
        return cls(**record)

    def verify(self, run_dir):
        """Names of listed files that are missing or whose digest changed."""
        bad = []
        for entry in self.files:
            path = Path(run_dir) / entry["path"]
            if not path.exists() or sha256_file(path) != entry["sha256"]:
                bad.append(entry["path"])
        return bad


def _cell(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def print_report(manifest, run_dir, console=None):
    console = console or Console()
    style = {"ok": "green", "failed": "red"}.get(manifest.status, "yellow")
    console.print(
        Panel(
            f"[bold]{manifest.verdict or 'no verdict'}[/bold]\n"
            f"scenario {manifest.scenario} | seed {manifest.seed} | status [{style}]{manifest.status}[/{style}]",
            title="ergowalk run",
            box=box.ROUNDED,
        )
    )
    if manifest.error:
        console.print(f"[red]error:[/red] {manifest.error}")

    summary = Table(title="summary", box=box.SIMPLE)
    summary.add_column("quantity")
    summary.add_column("value", justify="right")
    for key in sorted(manifest.summary):
        summary.add_row(key, _cell(manifest.summary[key]))
    console.print(summary)

    stages = Table(title="stages", box=box.SIMPLE)
    stages.add_column("stage")
    stages.add_column("wall time [s]", justify="right")
    for stage in manifest.stages:
        stages.add_row(stage["name"], f"{stage['wall_time']:.3f}")
    console.print(stages)

    bad = set(manifest.verify(run_dir))
    files = Table(title="artifacts", box=box.SIMPLE)
    files.add_column("file")
    files.add_column("bytes", justify="right")
    files.add_column("sha256")
    files.add_column("check")
    for entry in manifest.files:
        check = "[red]mismatch[/red]" if entry["path"] in bad else "[green]ok[/green]"
        files.add_row(entry["path"], str(entry["bytes"]), entry["sha256"][:16], check)
    console.print(files)
    return not bad
