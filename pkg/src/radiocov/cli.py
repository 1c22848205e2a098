"""Command line of Radiocov.

Subcommands::

    radiocov predict-serial    --dem --clutter --transmitters --diagrams --output ...
    radiocov predict-parallel  ... --mode {mw,mwd} (--local-workers N | --workers host:port,...)
    radiocov worker            --endpoint host:port --mode {mw,mwd} [--store-dir DIR]
    radiocov bench             ... --np 1,2,4,8 --repetitions 5 --report report.tsv

Exit status: 0 success, 2 configuration or input error, 3 connectivity
failure, 4 any other runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from radiocov import __version__
from radiocov.antenna import load_diagram_dir
from radiocov.bench import BenchKnobs, save_scaling_html, scaling_sweep, write_report
from radiocov.errors import ConfigError, ConnectivityError, DomainError, ParseError
from radiocov.logging import get_logger
from radiocov.propagation import ClutterLossTable, PropagationParams, load_clutter_losses
from radiocov.runtime import (
    MasterOptions,
    RunInputs,
    TcpWorkerListener,
    WorkerOptions,
    parse_endpoint,
    parse_endpoints,
    resolve_transport,
    run_local,
    run_tcp,
    worker_run,
)
from radiocov.store import FileResultStore
from radiocov.terrain import load_ascii_grid, write_ascii_grid
from radiocov.transmitters import load_transmitters
from radiocov.types import ExitCode, MultiScreenModel, RunMode, ScalingMode

__all__ = ["RunConfig", "build_parser", "main", "cmd_predict_serial", "cmd_predict_parallel", "cmd_worker", "cmd_bench"]

logger = get_logger(__name__)

_MS = 1e-3


class RunConfig(BaseModel):
    """Everything a prediction command needs, validated before any work starts.

    Attributes:
        dem_path: Terrain raster (ESRI ASCII)
        clutter_path: Clutter-code raster on the same lattice
        clutter_loss_table_path: ``code loss_db`` table; all codes cost 0 dB without one
        tx_csv_path: Transmitter network
        diagram_dir: Directory of antenna diagram files
        output_path: Coverage raster to write
        params: Run-wide propagation parameters
        mode: MW or MWD
        endpoints: Worker endpoints to dial (TCP)
        local_workers: Number of workers to start in this process
        store_dir: Result store directory (MWD)
        master_delay_s: Injected master service time per Result
        link_delay_s: Injected latency per message
        persist_delay_s: Injected write time per stored table
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    dem_path: Path
    clutter_path: Path
    clutter_loss_table_path: Path | None = None
    tx_csv_path: Path
    diagram_dir: Path
    output_path: Path | None = None
    params: PropagationParams = Field(default_factory=PropagationParams)
    mode: RunMode = RunMode.MW
    endpoints: tuple[str, ...] = ()
    local_workers: int | None = Field(default=None, ge=1)
    store_dir: Path | None = None
    master_delay_s: float = Field(default=0.0, ge=0)
    link_delay_s: float = Field(default=0.0, ge=0)
    persist_delay_s: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _inputs_exist(self) -> Self:
        for label, path in (
            ("DEM", self.dem_path),
            ("clutter raster", self.clutter_path),
            ("transmitter CSV", self.tx_csv_path),
        ):
            if not path.is_file():
                raise ValueError(f"{label} not found: {path}")
        if self.clutter_loss_table_path is not None and not self.clutter_loss_table_path.is_file():
            raise ValueError(f"clutter loss table not found: {self.clutter_loss_table_path}")
        if not self.diagram_dir.is_dir():
            raise ValueError(f"diagram directory not found: {self.diagram_dir}")
        return self

    @model_validator(mode="after")
    def _mwd_needs_store(self) -> Self:
        if self.mode is RunMode.MWD and self.store_dir is None:
            raise ValueError("mode mwd requires --store-dir")
        return self

    @model_validator(mode="after")
    def _one_worker_source(self) -> Self:
        if self.endpoints and self.local_workers is not None:
            raise ValueError("use either --workers or --local-workers, not both")
        return self

    def load_inputs(self) -> RunInputs:
        """Read every input file.

        Raises:
            ParseError: On a malformed input file
            ConfigError: If the files are well-formed but do not fit together
        """
        dem = load_ascii_grid(self.dem_path)
        clutter = load_ascii_grid(self.clutter_path)
        clutter_losses = (
            load_clutter_losses(self.clutter_loss_table_path)
            if self.clutter_loss_table_path is not None
            else ClutterLossTable()
        )
        transmitters = load_transmitters(
            self.tx_csv_path,
            frequency_mhz=self.params.frequency_mhz,
            radius_km=self.params.radius_m / 1000.0,
        )
        diagrams = load_diagram_dir(self.diagram_dir)
        try:
            return RunInputs(
                dem=dem,
                clutter=clutter,
                transmitters=transmitters,
                diagrams=diagrams,
                params=self.params,
                clutter_losses=clutter_losses,
            )
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def master_options(self) -> MasterOptions:
        return MasterOptions(master_delay_s=self.master_delay_s)

    def worker_options(self) -> WorkerOptions:
        return WorkerOptions(persist_delay_s=self.persist_delay_s)


# Argument parsing


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _mode_list(text: str) -> list[RunMode]:
    try:
        return [RunMode(part.strip().lower()) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"modes must be mw and/or mwd, got {text!r}") from None


def _add_input_flags(p: argparse.ArgumentParser, output: bool) -> None:
    p.add_argument("--dem", type=Path, required=True, help="Terrain raster (ESRI ASCII grid)")
    p.add_argument("--clutter", type=Path, required=True, help="Clutter-code raster on the DEM lattice")
    p.add_argument("--clutter-losses", type=Path, default=None, help="Clutter loss table, one 'code loss_db' per line")
    p.add_argument("--transmitters", type=Path, required=True, help="Transmitter CSV")
    p.add_argument("--diagrams", type=Path, required=True, help="Directory of antenna diagram files")
    if output:
        p.add_argument("--output", type=Path, required=True, help="Coverage raster to write")

    model = p.add_argument_group("propagation model")
    defaults = PropagationParams()
    model.add_argument("--frequency-mhz", type=float, default=defaults.frequency_mhz,
                       help="Carrier frequency for transmitters without one (default: %(default)s)")
    model.add_argument("--rx-height-m", type=float, default=defaults.rx_height_m,
                       help="Receiver height above ground (default: %(default)s)")
    model.add_argument("--radius-km", type=float, default=defaults.radius_m / 1000.0,
                       help="Transmission radius for transmitters without one (default: %(default)s)")
    model.add_argument("--roof-height-m", type=float, default=defaults.roof_height_m)
    model.add_argument("--street-width-m", type=float, default=defaults.street_width_m)
    model.add_argument("--building-separation-m", type=float, default=defaults.building_separation_m)
    model.add_argument("--fresnel-clearance", type=float, default=defaults.fresnel_clearance,
                       help="Fraction of the first Fresnel radius that must stay clear (default: %(default)s)")
    model.add_argument("--multi-screen", type=MultiScreenModel, choices=list(MultiScreenModel),
                       default=defaults.multi_screen, metavar="{knife-edge,cost231}",
                       help="Multi-screen term of NLOS cells (default: knife-edge)")


def _add_injection_flags(p: argparse.ArgumentParser) -> None:
    knobs = p.add_argument_group("bottleneck injection")
    knobs.add_argument("--inject-master-delay-ms", type=float, default=0.0, help="Master service time per Result")
    knobs.add_argument("--inject-link-delay-ms", type=float, default=0.0, help="Latency per protocol message")
    knobs.add_argument("--inject-persist-delay-ms", type=float, default=0.0, help="Extra write time per stored table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radiocov", description="Radio coverage prediction")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], type=str.upper)
    sub = parser.add_subparsers(dest="command", required=True)

    serial = sub.add_parser("predict-serial", help="Predict coverage in one process")
    _add_input_flags(serial, output=True)
    serial.set_defaults(handler=cmd_predict_serial)

    parallel = sub.add_parser("predict-parallel", help="Predict coverage with a master and workers")
    _add_input_flags(parallel, output=True)
    parallel.add_argument("--mode", type=RunMode, choices=list(RunMode), default=RunMode.MW, metavar="{mw,mwd}")
    workers = parallel.add_mutually_exclusive_group(required=True)
    workers.add_argument("--workers", default=None, metavar="HOST:PORT[,...]", help="Endpoints of running workers")
    workers.add_argument("--local-workers", type=int, default=None, metavar="N", help="Start N workers in this process")
    parallel.add_argument("--transport", choices=["channel", "tcp"], default=None,
                          help="Transport of --local-workers (default: $RADIOCOV_TRANSPORT or channel)")
    parallel.add_argument("--store-dir", type=Path, default=None, help="Result store directory (required for mwd)")
    parallel.add_argument("--connect-timeout", type=float, default=5.0, help="Seconds to reach each worker")
    _add_injection_flags(parallel)
    parallel.set_defaults(handler=cmd_predict_parallel)

    worker = sub.add_parser("worker", help="Serve one master over TCP")
    worker.add_argument("--endpoint", required=True, metavar="HOST:PORT", help="Address to listen on")
    worker.add_argument("--mode", type=RunMode, choices=list(RunMode), default=RunMode.MW, metavar="{mw,mwd}")
    worker.add_argument("--store-dir", type=Path, default=None, help="Result store directory (required for mwd)")
    worker.add_argument("--accept-timeout", type=float, default=60.0, help="Seconds to wait for the master")
    worker.add_argument("--recv-timeout", type=float, default=None, help="Seconds to wait for each master message")
    worker.add_argument("--inject-persist-delay-ms", type=float, default=0.0, help="Extra write time per stored table")
    worker.add_argument("--inject-link-delay-ms", type=float, default=0.0, help="Latency per protocol message")
    worker.set_defaults(handler=cmd_worker)

    bench = sub.add_parser("bench", help="Strong or weak scaling sweep")
    _add_input_flags(bench, output=False)
    bench.add_argument("--modes", type=_mode_list, default=[RunMode.MW, RunMode.MWD], help="Comma-separated modes")
    bench.add_argument("--np", type=_int_list, default=[1, 2, 4], help="Comma-separated worker counts")
    bench.add_argument("--repetitions", type=int, default=3, help="Runs per (mode, NP); best and median are reported")
    bench.add_argument("--scaling", type=ScalingMode, choices=list(ScalingMode), default=ScalingMode.STRONG,
                       metavar="{strong,weak}")
    bench.add_argument("--report", type=Path, default=Path("bench_report.tsv"), help="TSV report to write")
    bench.add_argument("--plot", type=Path, default=None, help="Also write HTML scaling charts")
    bench.add_argument("--store-dir", type=Path, default=None, help="Parent of the per-run MWD stores")
    _add_injection_flags(bench)
    bench.set_defaults(handler=cmd_bench)
    return parser


def _params_from_args(args: argparse.Namespace) -> PropagationParams:
    return PropagationParams(
        frequency_mhz=args.frequency_mhz,
        rx_height_m=args.rx_height_m,
        radius_m=args.radius_km * 1000.0,
        roof_height_m=args.roof_height_m,
        street_width_m=args.street_width_m,
        building_separation_m=args.building_separation_m,
        fresnel_clearance=args.fresnel_clearance,
        multi_screen=args.multi_screen,
    )


def _describe(error: Any) -> str:
    message = str(error["msg"]).removeprefix("Value error, ")
    location = ".".join(str(part) for part in error.get("loc", ()))
    return f"{location}: {message}" if location else message


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    """Validated :class:`RunConfig` from parsed flags.

    Raises:
        ConfigError: Naming every invalid field
    """
    workers = getattr(args, "workers", None)
    try:
        return RunConfig(
            dem_path=args.dem,
            clutter_path=args.clutter,
            clutter_loss_table_path=args.clutter_losses,
            tx_csv_path=args.transmitters,
            diagram_dir=args.diagrams,
            output_path=getattr(args, "output", None),
            params=_params_from_args(args),
            mode=getattr(args, "mode", RunMode.MW),
            endpoints=tuple(workers.split(",")) if workers else (),
            local_workers=getattr(args, "local_workers", None),
            store_dir=getattr(args, "store_dir", None),
            master_delay_s=getattr(args, "inject_master_delay_ms", 0.0) * _MS,
            link_delay_s=getattr(args, "inject_link_delay_ms", 0.0) * _MS,
            persist_delay_s=getattr(args, "inject_persist_delay_ms", 0.0) * _MS,
        )
    except ValidationError as exc:
        messages = "; ".join(_describe(error) for error in exc.errors())
        raise ConfigError(messages) from None


# Commands


def cmd_predict_serial(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    inputs = config.load_inputs()
    coverage = inputs.serial()
    assert config.output_path is not None
    write_ascii_grid(coverage, config.output_path)
    logger.info("Wrote coverage of %d transmitters to %s", len(inputs.transmitters), config.output_path)
    return ExitCode.OK


def cmd_predict_parallel(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    inputs = config.load_inputs()
    store = FileResultStore(config.store_dir) if config.mode is RunMode.MWD and config.store_dir else None

    if config.endpoints:
        run = run_tcp(
            inputs,
            parse_endpoints(",".join(config.endpoints)),
            config.mode,
            store=store,
            master_options=config.master_options(),
            connect_timeout=args.connect_timeout,
            link_delay_s=config.link_delay_s,
        )
    else:
        assert config.local_workers is not None
        run = run_local(
            inputs,
            config.local_workers,
            config.mode,
            store=store,
            master_options=config.master_options(),
            worker_options=config.worker_options(),
            link_delay_s=config.link_delay_s,
            transport=resolve_transport(args.transport),
        )
    assert config.output_path is not None
    write_ascii_grid(run.coverage, config.output_path)
    logger.info("Parallel %s run finished in %.3fs", config.mode.value, run.wall_clock_s)
    return ExitCode.OK


def cmd_worker(args: argparse.Namespace) -> int:
    endpoint = parse_endpoint(args.endpoint)
    mode: RunMode = args.mode
    if mode is RunMode.MWD and args.store_dir is None:
        raise ConfigError("mode mwd requires --store-dir")
    store = FileResultStore(args.store_dir) if mode is RunMode.MWD else None
    options = WorkerOptions(persist_delay_s=args.inject_persist_delay_ms * _MS, recv_timeout_s=args.recv_timeout)

    with TcpWorkerListener(endpoint.host, endpoint.port) as listener:
        link = listener.accept(timeout=args.accept_timeout, link_delay_s=args.inject_link_delay_ms * _MS)
    with link:
        report = worker_run(link, mode, store=store, options=options)
    logger.info("Worker served %d transmitters in %.3fs", len(report.assignments), report.wall_clock_s)
    return ExitCode.OK


def cmd_bench(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    inputs = config.load_inputs()
    knobs = BenchKnobs(
        master_delay_s=config.master_delay_s,
        link_delay_s=config.link_delay_s,
        persist_delay_s=config.persist_delay_s,
    )
    report = scaling_sweep(
        inputs,
        args.modes,
        args.np,
        repetitions=args.repetitions,
        scaling=args.scaling,
        knobs=knobs,
        store_root=args.store_dir,
    )
    frame = write_report(report, args.report)
    if args.plot is not None:
        save_scaling_html(frame, args.plot, title=f"{args.scaling.value.capitalize()} scaling")
    for row in report.failures:
        print(f"radiocov: {row.mode.value} NP={row.np} failed: {row.error}", file=sys.stderr)
    return ExitCode.RUNTIME if report.failures else ExitCode.OK


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``radiocov`` console script."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(asctime)s [%(name)s] %(levelname)s: %(message)s")

    try:
        return int(args.handler(args))
    except (ConfigError, ParseError, FileNotFoundError) as exc:
        print(f"radiocov: error: {exc}", file=sys.stderr)
        return ExitCode.CONFIG
    except ConnectivityError as exc:
        print(f"radiocov: connectivity error: {exc}", file=sys.stderr)
        return ExitCode.CONNECTIVITY
    except Exception as exc:
        logger.critical("%s failed", args.command, exc_info=True)
        print(f"radiocov: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ExitCode.RUNTIME
