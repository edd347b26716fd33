from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import pytest

from imtriage.forge import canonical_spec, fixture_paths, forge_device
from imtriage.model import record_to_dict

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}
_ACCEPTANCE_TITLES = {
    1: "round-trip fidelity over 50 random specs",
    2: "iOS file-system matrix covers the published table",
    3: "Android logical matrix reproduces the published table",
    4: "Tango payloads classified opaque",
    5: "Viber coordinates round-trip exactly",
    6: "evidence tree unchanged by a scan",
    7: "repeated scans are byte-identical",
    8: "single corrupted store isolated with exit 2",
    9: "timestamp epoch conversions",
}


@dataclass
class AcceptanceRecorder:
    """Records one verdict per acceptance criterion for the run summary."""

    results: dict[int, tuple[bool, str]] = field(default_factory=lambda: _ACCEPTANCE)

    def check(self, number: int, ok: bool, detail: str = "") -> None:
        previous = self.results.get(number)
        if previous is not None and not previous[0]:
            return
        self.results[number] = (bool(ok), detail)
        assert ok, f"acceptance {number} failed: {detail}"


@pytest.fixture(scope="session")
def acceptance() -> AcceptanceRecorder:
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title in _ACCEPTANCE_TITLES.items():
        if number not in _ACCEPTANCE:
            terminalreporter.write_line(f"[{number}] NOT RUN  {title}")
            continue
        ok, detail = _ACCEPTANCE[number]
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{number}] {verdict}  {title}" + (f" ({detail})" if detail else ""))


@dataclass(frozen=True)
class Fixture:
    out: Path
    image: Path
    manifest_path: Path
    manifest: object


def _forge(tmp_path_factory, name: str, os_kind: str, profile: str) -> Fixture:
    out = tmp_path_factory.mktemp(name) / "fixture"
    manifest = forge_device(canonical_spec(os_kind, profile), out)
    image, manifest_path = fixture_paths(out)
    return Fixture(out, image, manifest_path, manifest)


@pytest.fixture(scope="session")
def ios_fixture(tmp_path_factory) -> Fixture:
    return _forge(tmp_path_factory, "ios_fs", "ios", "filesystem")


@pytest.fixture(scope="session")
def android_fixture(tmp_path_factory) -> Fixture:
    return _forge(tmp_path_factory, "android_fs", "android", "filesystem")


@pytest.fixture(scope="session")
def android_logical_fixture(tmp_path_factory) -> Fixture:
    return _forge(tmp_path_factory, "android_logical", "android", "logical")


@pytest.fixture(scope="session")
def ios_logical_fixture(tmp_path_factory) -> Fixture:
    return _forge(tmp_path_factory, "ios_logical", "ios", "logical")


def canonical_json(records) -> list[str]:
    """Anchor-free, order-free comparison form of a record collection."""
    return sorted(json.dumps(record_to_dict(r, with_anchor=False), sort_keys=True) for r in records)
