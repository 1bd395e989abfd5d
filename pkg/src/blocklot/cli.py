"""Command-line client and operations tool.

The six transaction subcommands are thin HTTP clients; ``audit``,
``verify-offline``, ``export`` and ``fixture-verify`` work without a
running service. Exit codes are a stable contract:

    0  success / verification passed
    1  verification failure
    2  usage or precondition error
    3  transport error
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace as dc_replace
from pathlib import Path

import click
import requests

from . import core
from .beacon import BeaconMode, BlockHeader, load_fixture
from .errors import (
    BlockLotError,
    InsufficientRuns,
    InvalidParameter,
    MalformedResponse,
)
from .ledger import ReplicatedLedger
from .service import ApiConfig, run_service
from .verification import audit_seed_schedule, run_fairness_trial, verify_event

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_TRANSPORT = 3

DEFAULT_URL = "http://127.0.0.1:8712"


class CliError(click.ClickException):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def _request(ctx: click.Context, method: str, path: str, **kwargs) -> dict:
    url = ctx.obj["url"].rstrip("/") + path
    try:
        response = requests.request(method, url, timeout=30, **kwargs)
    except requests.RequestException as exc:
        raise CliError(f"cannot reach {url}: {exc}", EXIT_TRANSPORT)
    try:
        payload = response.json()
    except ValueError:
        raise CliError(
            f"{url} returned non-JSON data (HTTP {response.status_code})",
            EXIT_TRANSPORT,
        )
    if response.status_code >= 500:
        raise CliError(f"server error: {payload}", EXIT_TRANSPORT)
    if response.status_code >= 400:
        message = payload.get("message", str(payload))
        raise CliError(
            f"{payload.get('error', 'error')}: {message}", EXIT_USAGE
        )
    return payload


def _emit(ctx: click.Context, payload: dict, text: str) -> None:
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(text)


@click.group()
@click.option("--url", envvar="BLOCKLOT_URL", default=DEFAULT_URL, show_default=True)
@click.option("--json", "json_output", is_flag=True, help="machine-readable output")
@click.pass_context
def main(ctx: click.Context, url: str, json_output: bool) -> None:
    """blocklot: verifiable lotteries over a replicated ledger."""
    ctx.ensure_object(dict)
    ctx.obj["url"] = url
    ctx.obj["json"] = json_output


@main.command("open")
@click.option("--name", required=True)
@click.option("--date", "announcement_date", required=True, help="ISO-8601 UTC")
@click.option("--winners", type=int, required=True)
@click.option("--offset", type=int, default=0, show_default=True)
@click.option("--note", default="")
@click.pass_context
def open_cmd(ctx, name, announcement_date, winners, offset, note) -> None:
    """Register a lottery event; prints the organizer token once."""
    payload = _request(
        ctx,
        "POST",
        "/events",
        json={
            "name": name,
            "announcement_date": announcement_date,
            "num_winners": winners,
            "block_offset": offset,
            "note": note,
        },
    )
    _emit(
        ctx,
        payload,
        f"event {payload['event_id']} registered, target height "
        f"{payload['target_height']}\norganizer token (shown once): "
        f"{payload['organizer_token']}",
    )


@main.command("query")
@click.option("--event-id", default=None, help="show one event instead of all")
@click.pass_context
def query_cmd(ctx, event_id) -> None:
    """List registered events."""
    if event_id:
        view = _request(ctx, "GET", f"/events/{event_id}")
        _emit(ctx, view, _format_event_line(view))
        return
    views = _request_list(ctx, "GET", "/events")
    if ctx.obj["json"]:
        click.echo(json.dumps(views, indent=2, sort_keys=True))
        return
    if not views:
        click.echo("no events")
        return
    for view in views:
        click.echo(_format_event_line(view))


def _request_list(ctx: click.Context, method: str, path: str) -> list:
    url = ctx.obj["url"].rstrip("/") + path
    try:
        response = requests.request(method, url, timeout=30)
        payload = response.json()
    except (requests.RequestException, ValueError) as exc:
        raise CliError(f"cannot reach {url}: {exc}", EXIT_TRANSPORT)
    if response.status_code != 200:
        raise CliError(f"unexpected response: {payload}", EXIT_TRANSPORT)
    return payload


def _format_event_line(view: dict) -> str:
    return (
        f"{view['event_id']}  {view['name']!r}  {view['status']}  "
        f"announce={view['announcement_date']}  participants="
        f"{view['participant_count']}  winners={view['num_winners']}  "
        f"target={view['target_height']}"
    )


@main.command("subscribe")
@click.option("--event-id", required=True)
@click.option("--identity", required=True, help="name or e-mail address")
@click.pass_context
def subscribe_cmd(ctx, event_id, identity) -> None:
    """Join an event; prints the participant token once."""
    payload = _request(
        ctx, "POST", f"/events/{event_id}/subscribe", json={"identity": identity}
    )
    _emit(
        ctx,
        payload,
        f"subscribed to {event_id}\nparticipant token (shown once): {payload['token']}",
    )


@main.command("draw")
@click.option("--event-id", required=True)
@click.option("--token", required=True, help="organizer token (hex)")
@click.pass_context
def draw_cmd(ctx, event_id, token) -> None:
    """Fix the winners from the target block hash."""
    payload = _request(
        ctx, "POST", f"/events/{event_id}/draw", json={"organizer_token": token}
    )
    winners = "\n".join("  " + w for w in payload["winner_list"])
    _emit(
        ctx,
        payload,
        f"event {event_id} drawn with seed {payload['random_seed']}\n"
        f"winners:\n{winners}\nverifiable key: {payload['verifiable_random_key']}",
    )


@main.command("check")
@click.option("--event-id", required=True)
@click.option("--identity", required=True)
@click.option("--token", required=True, help="participant token (hex)")
@click.pass_context
def check_cmd(ctx, event_id, identity, token) -> None:
    """Report whether (identity, token) is a winner."""
    payload = _request(
        ctx,
        "GET",
        f"/events/{event_id}/check",
        params={"identity": identity, "token": token},
    )
    _emit(ctx, payload, "WINNER" if payload["winner"] else "NOT A WINNER")


@main.command("verify")
@click.option("--event-id", required=True)
@click.pass_context
def verify_cmd(ctx, event_id) -> None:
    """Run the four server-side verification checks."""
    payload = _request(ctx, "GET", f"/events/{event_id}/verify")
    _emit(ctx, payload, _format_report(payload))
    if not payload["all_ok"]:
        sys.exit(EXIT_VERIFICATION_FAILED)


def _format_report(report: dict) -> str:
    lines = []
    for check in ("seed_ok", "event_integrity_ok", "winner_recomputation_ok", "majority_ok"):
        lines.append(f"{check:28s} {'pass' if report[check] else 'FAIL'}")
    for item in report["details"]:
        lines.append(f"  {item['check']}: {item['message']}")
    lines.append("VERIFIED" if report["all_ok"] else "VERIFICATION FAILED")
    return "\n".join(lines)


# --- offline tools ----------------------------------------------------------


def _load_event_file(path: str) -> core.LotteryEvent:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read event file: {exc}", EXIT_USAGE)
    try:
        return core.parse_ledger_value(data)
    except BlockLotError as exc:
        raise CliError(f"bad event file: {exc}", EXIT_USAGE)


def _load_header_file(path: str) -> BlockHeader:
    """One fixture-format CSV line (see docs/formats.md)."""
    try:
        headers = load_fixture(path)
    except BlockLotError as exc:
        raise CliError(f"bad header file: {exc}", EXIT_USAGE)
    if len(headers) != 1:
        raise CliError(
            f"header file must contain exactly one record, found {len(headers)}",
            EXIT_USAGE,
        )
    return next(iter(headers.values()))


@main.command("export")
@click.option("--data-dir", required=True, help="service ledger data directory")
@click.option("--event-id", required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--peers", type=int, default=3, show_default=True)
@click.pass_context
def export_cmd(ctx, data_dir, event_id, out, peers) -> None:
    """Extract an event from the peer logs (majority value) for offline use."""
    try:
        ledger = ReplicatedLedger(peers, data_dir)
        value = ledger.majority_read(event_id)
    except BlockLotError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    if out:
        Path(out).write_bytes(value)
        _emit(ctx, {"event_id": event_id, "out": out}, f"exported to {out}")
    else:
        click.echo(value.decode("utf-8"), nl=False)


@main.command("verify-offline")
@click.option("--event", "event_path", required=True, type=click.Path(exists=True))
@click.option("--header", "header_path", required=True, type=click.Path(exists=True))
@click.pass_context
def verify_offline_cmd(ctx, event_path, header_path) -> None:
    """Verify an exported event file against a block header, no service."""
    event = _load_event_file(event_path)
    header = _load_header_file(header_path)
    try:
        report = verify_event(event, header, event.initial_random_key)
    except BlockLotError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    payload = report.to_dict()
    payload["all_ok"] = report.all_ok
    _emit(ctx, payload, _format_report(payload))
    if not report.all_ok:
        sys.exit(EXIT_VERIFICATION_FAILED)


@main.command("audit")
@click.option("--event", "event_path", required=True, type=click.Path(exists=True))
@click.option("--runs", type=int, default=1000, show_default=True)
@click.option("--zmax", type=float, default=4.0, show_default=True)
@click.option("--audit-seed", default="blocklot-audit", show_default=True)
@click.pass_context
def audit_cmd(ctx, event_path, runs, zmax, audit_seed) -> None:
    """Offline z-test fairness audit over simulated draws."""
    event = _load_event_file(event_path)
    try:
        report = run_fairness_trial(
            event.member_list,
            event.num_winners,
            runs,
            audit_seed_schedule(audit_seed, runs),
            z_max=zmax,
        )
    except InsufficientRuns as exc:
        raise CliError(str(exc), EXIT_USAGE)
    except BlockLotError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    if ctx.obj["json"]:
        click.echo(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        click.echo(report.to_table(), nl=False)
        click.echo(
            f"runs={report.runs} p={report.win_probability:.6f} zmax={report.z_max}"
            f" -> {'PASS' if report.passed else 'FAIL'}"
        )
    if not report.passed:
        sys.exit(EXIT_VERIFICATION_FAILED)


@main.command("fixture-verify")
@click.option("--fixture", required=True, type=click.Path(exists=True))
@click.pass_context
def fixture_verify_cmd(ctx, fixture) -> None:
    """Recompute every block hash in a fixture file."""
    try:
        headers = load_fixture(fixture)
    except MalformedResponse as exc:
        _emit(ctx, {"ok": False, "message": str(exc)}, f"FAIL: {exc}")
        sys.exit(EXIT_VERIFICATION_FAILED)
    except BlockLotError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    heights = sorted(headers)
    _emit(
        ctx,
        {"ok": True, "heights": heights},
        f"{len(heights)} headers verified (heights {heights[0]}..{heights[-1]})",
    )


@main.command("serve")
@click.option("--listen", default="127.0.0.1:8712", show_default=True)
@click.option("--peers", type=int, default=3, show_default=True)
@click.option("--confirmation-depth", type=int, default=6, show_default=True)
@click.option("--data-dir", default=None)
@click.option("--beacon-mode", type=click.Choice(["LIVE", "FIXTURE"]), default=None)
@click.option("--beacon-url", default=None)
@click.option("--beacon-fixture", default=None)
@click.option("--ui-dist", default=None, help="directory of built web UI assets")
def serve_cmd(
    listen, peers, confirmation_depth, data_dir, beacon_mode, beacon_url,
    beacon_fixture, ui_dist,
) -> None:
    """Run the HTTP service (environment variables fill unset options)."""
    try:
        env_config = ApiConfig.from_env()
        beacon = env_config.beacon
        if beacon_mode:
            beacon = dc_replace(beacon, mode=BeaconMode(beacon_mode))
        if beacon_url:
            beacon = dc_replace(beacon, base_url=beacon_url)
        if beacon_fixture:
            beacon = dc_replace(beacon, fixture_path=beacon_fixture)
        config = dc_replace(
            env_config,
            listen_address=listen,
            peer_count=peers,
            beacon=beacon,
            confirmation_depth=confirmation_depth,
            data_dir=data_dir or env_config.data_dir,
            ui_dist=ui_dist or env_config.ui_dist,
        )
    except (InvalidParameter, ValueError) as exc:
        raise CliError(str(exc), EXIT_USAGE)
    run_service(config)


if __name__ == "__main__":
    main()
