"""
This script contains code for loading and validating JSON scenario files.

A scenario holds the world, the reference path, the initial state and every
gain and setting of a run:

    {
        "world": {"workspace": [[0, 0], [12, 0], [12, 6], [0, 6]],
                  "obstacles": [{"type": "disk", "center": [3, 2.6], "radius": 0.8},
                                {"type": "polygon", "vertices": [[7.5, 0.5], ...]}],
                  "robot_radius": 0.25},
        "path": {"waypoints": [[1, 1], [5, 1], [7, 4.5], [11, 4.5]]},
        "initial": {"theta": 0.0},
        "goal": [11, 4.5],
        "gains": {"kv": 1.0, "kw": 2.0},
        "governor": {"k_eps": 4.0, "k_s": 4.0, "stall_window": 5.0},
        "prediction": {"method": "diamond", "mode": "bi",
                       "reachable_resolution": 0.002, "reachable_max_samples": 200},
        "integrator": {"rel_tol": 1e-6, "abs_tol": 1e-9, "max_time": 200.0},
        "output": {"directory": "out", "snapshot_every": 1.0},
        "fit": {"orders": [1, 2, 3], "grid_size": 2001, "starts": 1, "seed": 0}
    }

Only "world" and "path" are required. Unknown keys are rejected.
"""

import json
import logging
import numpy as np

from pirouette.utils import DomainError, ValidationError
from pirouette.geometry.sets import Disk, Polygon
from pirouette.unicycle import UnicycleState, ControlGains, BIDIRECTIONAL, check_mode
from pirouette.predict import DIAMOND, ReachableCache, check_method
from pirouette.simulate import IntegratorSettings
from pirouette.govern import World, ReferencePath, GovernorGains, validate_path

logger = logging.getLogger(__name__)

SECTIONS = {
    "world": ("workspace", "obstacles", "robot_radius"),
    "path": ("waypoints",),
    "initial": ("position", "theta"),
    "goal": None,
    "gains": ("kv", "kw"),
    "governor": ("k_eps", "k_s", "stall_window"),
    "prediction": ("method", "mode", "reachable_resolution", "reachable_max_samples"),
    "integrator": ("rel_tol", "abs_tol", "max_step", "max_time", "goal_eps"),
    "output": ("directory", "snapshot_every"),
    "fit": ("orders", "grid_size", "starts", "seed"),
}
REQUIRED = ("world", "path")
OBSTACLE_KEYS = {"disk": ("type", "center", "radius"), "polygon": ("type", "vertices")}

# ---------------------------------------------------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------------------------------------------------


class Scenario(object):
    """A validated run configuration."""

    def __init__(self, world, path, initial, goal, gains, governor, integrator, method=DIAMOND,
                 mode=BIDIRECTIONAL, stall_window=5.0, reachable=None, output=None, fit=None, source=None):
        """
        Description
        ----------
        Everything a run needs. Use load_scenario or parse_scenario to build
        one from a file.

        Parameters
        ----------
        world: World
            The environment.
        path: ReferencePath
            The reference path.
        initial: UnicycleState
            Initial robot state.
        goal: array_like
            Fixed goal of the simulate and predict commands.
        gains: ControlGains
            Unicycle control gains.
        governor: GovernorGains
            Time governor gains.
        integrator: IntegratorSettings
            Integrator settings.
        method: String
            Prediction method.
        mode: String
            Steering mode.
        stall_window: Float
            Stall diagnostic window in seconds.
        reachable: ReachableCache
            Forward reachable chain cache for the governor.
        output: dict
            Output directory and snapshot period.
        fit: dict
            Sine integral fit options.
        source: String
            Where the scenario came from.

        Returns
        ----------
        Scenario object
        """
        self.world = world
        self.path = path
        self.initial = initial
        self.goal = np.asarray(goal, dtype=float)
        self.gains = gains
        self.governor = governor
        self.integrator = integrator
        self.method = check_method(method)
        self.mode = check_mode(mode)
        self.stall_window = stall_window
        self.reachable = reachable or ReachableCache()
        self.output = dict({"directory": "out", "snapshot_every": 1.0}, **(output or {}))
        self.fit = dict({"orders": [1, 2, 3], "grid_size": 2001, "starts": 1, "seed": 0}, **(fit or {}))
        self.source = source

    def override(self, method=None, mode=None, max_time=None, out=None, seed=None):
        """Apply command line overrides in place and return the scenario."""
        if method is not None:
            self.method = check_method(method)
        if mode is not None:
            self.mode = check_mode(mode)
        if max_time is not None:
            self.integrator = self.integrator.replace(max_time=max_time)
        if out is not None:
            self.output["directory"] = out
        if seed is not None:
            self.fit["seed"] = seed
        return self

    def to_record(self):
        return {"source": self.source, "world": self.world.to_record(), "path": self.path.to_record(),
                "initial": self.initial.as_array().tolist(), "goal": self.goal.tolist(),
                "gains": self.gains.to_record(), "governor": self.governor.to_record(),
                "stall_window": self.stall_window, "method": self.method, "mode": self.mode,
                "reachable": self.reachable.to_record(), "integrator": self.integrator.to_record(),
                "output": self.output, "fit": self.fit}

    def __repr__(self):
        return "Scenario(source={!r}, method={}, mode={})".format(self.source, self.method, self.mode)

# ---------------------------------------------------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------------------------------------------------


def _line_of(text, key):
    """First line (1-based) mentioning a quoted key, None if absent."""
    needle = '"{}"'.format(key)
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None


def _check_keys(section, data, allowed, text):
    if not isinstance(data, dict):
        raise ValidationError("Section {!r} must be an object.".format(section), line=_line_of(text, section))
    for key in data:
        if key not in allowed:
            raise ValidationError("Unknown key {!r} in {!r}.".format(key, section), line=_line_of(text, key))


def _obstacle(record, text):
    if not isinstance(record, dict) or record.get("type") not in OBSTACLE_KEYS:
        raise ValidationError("Obstacles need a type of 'disk' or 'polygon'.", line=_line_of(text, "obstacles"))
    _check_keys("obstacles", record, OBSTACLE_KEYS[record["type"]], text)
    if record["type"] == "disk":
        return Disk(record["center"], record["radius"])
    return Polygon(record["vertices"])


class _Section(object):
    """Turns the domain errors raised while building a section into validation errors."""

    def __init__(self, name, text):
        self.name = name
        self.text = text

    def __enter__(self):
        return self

    def __exit__(self, kind, error, traceback):
        if kind is not None and issubclass(kind, (ValueError, KeyError, TypeError)) \
                and not isinstance(error, ValidationError):
            message = "Missing key {} in {!r}.".format(error, self.name) if kind is KeyError else str(error)
            raise ValidationError("{}: {}".format(self.name, message), line=_line_of(self.text, self.name)) from error
        return False


def parse_scenario(text, source=None, check_clearance=True):
    """
    Description
    ----------
    Build a Scenario from JSON text.

    Parameters
    ----------
    text: String
        The JSON document.
    source: String
        Name of the document for messages.
    check_clearance: Boolean
        Validate that the path keeps a positive clearance.

    Returns
    ----------
    Scenario
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ValidationError("Invalid JSON: {} (column {}).".format(error.msg, error.colno), line=error.lineno)
    if not isinstance(data, dict):
        raise ValidationError("Scenario must be a JSON object.", line=1)
    for section in data:
        if section not in SECTIONS:
            raise ValidationError("Unknown section {!r}.".format(section), line=_line_of(text, section))
    for section in REQUIRED:
        if section not in data:
            raise ValidationError("Missing required section {!r}.".format(section))
    for section, allowed in SECTIONS.items():
        if allowed is not None and section in data:
            _check_keys(section, data[section], allowed, text)

    with _Section("world", text):
        world_data = data["world"]
        world = World(Polygon(world_data["workspace"]),
                      [_obstacle(o, text) for o in world_data.get("obstacles", [])],
                      world_data.get("robot_radius", 0.0))
    with _Section("path", text):
        path = ReferencePath(data["path"]["waypoints"])
    with _Section("initial", text):
        initial_data = data.get("initial", {})
        initial = UnicycleState(initial_data.get("position", path.waypoints[0]), initial_data.get("theta", 0.0))
    with _Section("goal", text):
        goal = np.asarray(data.get("goal", path.waypoints[-1]), dtype=float)
        if goal.shape != (2,):
            raise DomainError("Goal must be a point [x, y].")
    with _Section("gains", text):
        gains = ControlGains(**data.get("gains", {}))
    with _Section("governor", text):
        governor_data = dict(data.get("governor", {}))
        stall_window = governor_data.pop("stall_window", 5.0)
        governor = GovernorGains(**governor_data)
    with _Section("prediction", text):
        prediction = data.get("prediction", {})
        method = check_method(prediction.get("method", DIAMOND))
        mode = check_mode(prediction.get("mode", BIDIRECTIONAL))
        reachable = ReachableCache(resolution=prediction.get("reachable_resolution", 2e-3),
                                   max_samples=prediction.get("reachable_max_samples", 200))
    with _Section("integrator", text):
        integrator = IntegratorSettings(**data.get("integrator", {}))
    with _Section("output", text):
        output = data.get("output", {})
        if "snapshot_every" in output and not output["snapshot_every"] > 0:
            raise DomainError("Snapshot period parameter must be greater than zero.")
    with _Section("fit", text):
        fit = data.get("fit", {})
        if any(order not in (1, 2, 3) for order in fit.get("orders", [1, 2, 3])):
            raise DomainError("Fit orders must be 1, 2 or 3.")

    if check_clearance:
        try:
            validate_path(world, path)
        except ValidationError as error:
            raise ValidationError(str(error), line=_line_of(text, "waypoints"))

    scenario = Scenario(world, path, initial, goal, gains, governor, integrator, method=method, mode=mode,
                        stall_window=stall_window, reachable=reachable, output=output, fit=fit, source=source)
    logger.debug("Loaded %r", scenario)
    return scenario


def load_scenario(filename, check_clearance=True):
    """
    Description
    ----------
    Read and validate a scenario file.

    Parameters
    ----------
    filename: String
        Path of the JSON scenario.
    check_clearance: Boolean
        Validate that the path keeps a positive clearance.

    Returns
    ----------
    Scenario
    """
    try:
        with open(filename, "r") as fh:
            text = fh.read()
    except OSError as error:
        raise ValidationError("Cannot read scenario {}: {}".format(filename, error.strerror))
    return parse_scenario(text, source=str(filename), check_clearance=check_clearance)
