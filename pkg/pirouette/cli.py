"""
Command line interface of pirouette.

    pirouette simulate --scenario scenarios/benchmark.json --out out
    pirouette predict  --scenario scenarios/benchmark.json --method cone
    pirouette follow   --scenario scenarios/benchmark.json --method diamond
    pirouette compare  --scenario scenarios/benchmark.json --workers 4
    pirouette fit-si   --seed 0

Exit codes: 0 success, 2 validation failure, 3 precondition failure,
4 truncation or non-convergence.
"""

import os
import sys
import json
import logging
import argparse
from multiprocessing import Pool
import numpy as np

from pirouette import __version__
from pirouette.utils import (DomainError, PreconditionError, ValidationError, StiffnessError,
                             TruncationError, FitError)
from pirouette.predict import (METHODS, DIAMOND, REACHABLE, MotionPrediction, predict,
                               characteristic_points, prediction_radius_about_goal)
from pirouette.geometry.sets import PointChain
from pirouette.simulate import COLUMNS, simulate_to_goal, integrated_turning
from pirouette.turning import fit_si_sinusoids, turning_report
from pirouette.govern import follow_path
from pirouette.validation import containment_violations
from pirouette.scenario import load_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PRECONDITION = 3
EXIT_TRUNCATION = 4

# dilation used when auditing snapshots against the emitted trajectory
AUDIT_TOL = 1e-6

# ---------------------------------------------------------------------------------------------------------------------
# Run Report
# ---------------------------------------------------------------------------------------------------------------------


class RunReport(object):
    """Summary record of a command."""

    def __init__(self, command, scenario=None, **fields):
        self.command = command
        self.version = __version__
        self.fields = fields
        if scenario is not None:
            self.fields.setdefault("method", scenario.method)
            self.fields.setdefault("mode", scenario.mode)
            self.fields.setdefault("gains", scenario.gains.to_record())
            self.fields.setdefault("source", scenario.source)

    def __getitem__(self, key):
        return self.fields[key]

    def to_record(self):
        return dict({"command": self.command, "version": self.version}, **self.fields)

    def write(self, directory):
        filename = os.path.join(directory, "report_{}.json".format(self.command.replace("-", "_")))
        _write_json(filename, self.to_record())
        return filename


def _write_json(filename, record):
    with open(filename, "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_columns(filename, columns):
    np.savetxt(filename, columns, header=" ".join(COLUMNS), fmt="%.10g")


def _output_directory(scenario):
    directory = scenario.output["directory"]
    os.makedirs(directory, exist_ok=True)
    return directory


def _points_record(points):
    return {name: value.tolist() for name, value in points._asdict().items()}

# ---------------------------------------------------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------------------------------------------------


def _snapshot(trajectory, index, gains, mode):
    """All prediction sets of one trajectory sample, audited against the samples that follow it."""
    state = trajectory.state(index)
    remainder = trajectory.positions[index:]
    predictions = []
    for method in METHODS:
        if method == REACHABLE:
            chain = PointChain(np.vstack([remainder, trajectory.goal]))
            predictions.append(MotionPrediction(REACHABLE, chain, trajectory.goal, state, mode))
        elif method == DIAMOND and not gains.spiral_free:
            logger.warning("Skipping diamond snapshot: kv > kw.")
        else:
            predictions.append(predict(state, trajectory.goal, gains, method, mode))
    records = []
    violations = 0
    for prediction in predictions:
        bad = containment_violations(prediction.body, remainder, AUDIT_TOL)
        violations += bad.shape[0]
        record = prediction.to_record()
        record["radius"] = prediction_radius_about_goal(prediction)
        record["violations"] = int(bad.shape[0])
        records.append(record)
    return {"time": float(trajectory.t[index]), "index": int(index), "predictions": records}, violations


def run_simulate(scenario):
    """Closed loop towards the fixed goal with periodic prediction snapshots."""
    directory = _output_directory(scenario)
    trajectory = simulate_to_goal(scenario.initial, scenario.goal, scenario.gains, scenario.mode,
                                  scenario.integrator)
    _write_columns(os.path.join(directory, "trajectory.txt"), trajectory.as_columns())

    period = scenario.output["snapshot_every"]
    times = np.arange(0.0, trajectory.t[-1], period)
    indices = sorted(set([0] + [int(np.searchsorted(trajectory.t, t)) for t in times]))
    snapshots, violations = [], 0
    for index in indices:
        snapshot, bad = _snapshot(trajectory, index, scenario.gains, scenario.mode)
        snapshots.append(snapshot)
        violations += bad
    _write_json(os.path.join(directory, "snapshots.json"), snapshots)
    if violations:
        logger.warning("%d trajectory samples fall outside their snapshot sets.", violations)

    closed_form = turning_report(scenario.initial, scenario.goal, scenario.gains, scenario.mode)
    report = RunReport("simulate", scenario, samples=len(trajectory), final_time=float(trajectory.t[-1]),
                       terminal_distance=float(trajectory.dist[-1]),
                       closed_form_turning=closed_form.theta_total,
                       final_orientation=float(trajectory.final_state.orientation),
                       closed_form_orientation=closed_form.final_orientation,
                       snapshots=len(snapshots), audit_violations=violations,
                       truncated=trajectory.truncated)
    if not trajectory.truncated:
        signed, absolute = integrated_turning(trajectory)
        report.fields.update(total_turning=signed, total_turning_abs=absolute)
    report.write(directory)
    if trajectory.truncated:
        raise TruncationError("Closed loop did not reach the goal within {} s.".format(scenario.integrator.max_time))
    return report


def run_predict(scenario, method=None):
    """Prediction sets and characteristic points of the initial state."""
    directory = _output_directory(scenario)
    methods = METHODS if method is None else (method,)
    state, goal, gains = scenario.initial, scenario.goal, scenario.gains
    predictions = [predict(state, goal, gains, m, scenario.mode, settings=scenario.integrator) for m in methods]
    record = {"predictions": [dict(p.to_record(), radius=prediction_radius_about_goal(p)) for p in predictions],
              "turning": turning_report(state, goal, gains, scenario.mode)._asdict()}
    if gains.spiral_free:
        record["characteristic_points"] = _points_record(characteristic_points(state, goal, gains))
    _write_json(os.path.join(directory, "prediction.json"), record)
    report = RunReport("predict", scenario, methods=list(methods),
                       radii={p.method: prediction_radius_about_goal(p) for p in predictions})
    report.write(directory)
    return report


def _follow(scenario, method):
    return follow_path(scenario.world, scenario.path, scenario.initial, scenario.gains, scenario.governor,
                       method, scenario.mode, scenario.integrator, reachable=scenario.reachable,
                       stall_window=scenario.stall_window)


def _follow_job(job):
    scenario, method = job
    return _follow(scenario, method)


def _follow_report(result):
    turning = float(np.sum(np.abs(np.diff(result.orientations))))
    return dict(result.summary(), total_turning=float(result.orientations[-1] - result.orientations[0]),
                total_turning_abs=turning)


def run_follow(scenario):
    """Governed path following with the scenario's prediction method."""
    directory = _output_directory(scenario)
    result = _follow(scenario, scenario.method)
    _write_columns(os.path.join(directory, "follow_{}.txt".format(scenario.method)), result.as_columns())
    report = RunReport("follow", scenario, **_follow_report(result))
    report.write(directory)
    if not result.reached:
        raise TruncationError("Path following did not finish within {} s.".format(scenario.integrator.max_time))
    return report


def run_compare(scenario, workers=len(METHODS)):
    """Path following under every prediction method, with travel times and speed profiles."""
    directory = _output_directory(scenario)
    jobs = [(scenario, method) for method in METHODS]
    if workers > 1:
        with Pool(min(workers, len(jobs))) as pool:
            results = pool.map(_follow_job, jobs)
    else:
        results = [_follow_job(job) for job in jobs]

    rows = []
    for result in results:
        _write_columns(os.path.join(directory, "follow_{}.txt".format(result.method)), result.as_columns())
        np.savetxt(os.path.join(directory, "speed_{}.txt".format(result.method)),
                   np.column_stack([result.t, result.speed, result.s]), header="time speed s", fmt="%.10g")
        rows.append("{} {:.6f} {:.6f} {:.6f} {}".format(result.method, result.travel_time, result.average_speed,
                                                       result.min_clearance, int(result.reached)))
    with open(os.path.join(directory, "travel_times.txt"), "w") as fh:
        fh.write("# method travel_time average_speed min_clearance reached\n")
        fh.write("\n".join(rows) + "\n")

    report = RunReport("compare", scenario, runs={r.method: _follow_report(r) for r in results})
    report.write(directory)
    if not all(r.reached for r in results):
        raise TruncationError("Not every method finished within {} s.".format(scenario.integrator.max_time))
    return report


def run_fit(orders=(1, 2, 3), grid_size=2001, starts=1, seed=0, directory="out"):
    """Sinusoid approximations of the sine integral for each order."""
    os.makedirs(directory, exist_ok=True)
    fits = {}
    for order in orders:
        fits[str(order)] = fit_si_sinusoids(order, grid_size=grid_size, starts=starts, seed=seed).to_record()
    _write_json(os.path.join(directory, "si_fit.json"), fits)
    report = RunReport("fit-si", fits=fits, grid_size=grid_size, starts=starts, seed=seed)
    report.write(directory)
    return report

# ---------------------------------------------------------------------------------------------------------------------
# Entry Point
# ---------------------------------------------------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="pirouette",
                                     description="Unicycle feedback motion prediction and safe path following.")
    parser.add_argument("--version", action="version", version="%(prog)s {}".format(__version__))
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="JSON scenario file")
    common.add_argument("--method", choices=METHODS, help="prediction method")
    common.add_argument("--mode", choices=("bi", "fwd", "bwd"), help="steering mode")
    common.add_argument("--out", help="output directory")
    common.add_argument("--max-time", type=float, help="integration horizon in seconds")

    commands = parser.add_subparsers(dest="command")
    commands.required = True
    commands.add_parser("simulate", parents=[common], help="closed loop towards the fixed goal")
    commands.add_parser("predict", parents=[common], help="prediction sets of the initial state")
    commands.add_parser("follow", parents=[common], help="governed path following")
    compare = commands.add_parser("compare", parents=[common], help="path following with every method")
    compare.add_argument("--workers", type=int, default=len(METHODS), help="parallel runs")
    fit = commands.add_parser("fit-si", help="sinusoid approximations of the sine integral")
    fit.add_argument("--scenario", help="JSON scenario file with a fit section")
    fit.add_argument("--out", help="output directory")
    fit.add_argument("--seed", type=int, help="seed of the extra starting points")
    fit.add_argument("--starts", type=int, help="number of starting points per order")
    return parser


def configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def run(args):
    """Dispatch a parsed command line and return its RunReport."""
    if args.command == "fit-si":
        options = {"orders": [1, 2, 3], "grid_size": 2001, "starts": 1, "seed": 0}
        directory = "out"
        if args.scenario:
            scenario = load_scenario(args.scenario, check_clearance=False)
            options.update(scenario.fit)
            directory = scenario.output["directory"]
        if args.seed is not None:
            options["seed"] = args.seed
        if args.starts is not None:
            options["starts"] = args.starts
        return run_fit(options["orders"], options["grid_size"], options["starts"], options["seed"],
                       args.out or directory)

    scenario = load_scenario(args.scenario).override(method=args.method, mode=args.mode,
                                                     max_time=args.max_time, out=args.out)
    if args.command == "simulate":
        return run_simulate(scenario)
    if args.command == "predict":
        return run_predict(scenario, args.method)
    if args.command == "follow":
        return run_follow(scenario)
    return run_compare(scenario, args.workers)


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args)
    try:
        report = run(args)
    except (ValidationError, DomainError) as error:
        logger.error("Invalid input: %s", error)
        return EXIT_VALIDATION
    except PreconditionError as error:
        logger.error("Precondition violated: %s", error)
        return EXIT_PRECONDITION
    except (TruncationError, StiffnessError, FitError) as error:
        logger.error("Run did not converge: %s", error)
        return EXIT_TRUNCATION
    logger.info("%s finished: %s", report.command, json.dumps(report.to_record(), sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
