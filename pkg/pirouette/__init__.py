"""
Automatically import submodules for pirouette package.
"""

__version__ = "0.1.0"

import pirouette.utils
import pirouette.geometry
import pirouette.validation
import pirouette.unicycle
import pirouette.turning
import pirouette.simulate
import pirouette.predict
import pirouette.govern
import pirouette.scenario
