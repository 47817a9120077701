"""
This script contains code for the planar geometry used by the motion
predictions and the free space model.
"""

import pirouette.geometry.primitives
import pirouette.geometry.sets
import pirouette.geometry.distance
