"""The six activity classes and their canonical ordering.

The integer value of each label is its position in alphabetical order and
is the single class index used everywhere: one-hot label columns,
confusion-matrix axes and checkpoint metadata.
"""

from __future__ import annotations

import enum


class ActivityLabel(enum.IntEnum):
    DOWNSTAIRS = 0
    JOGGING = 1
    SITTING = 2
    STANDING = 3
    UPSTAIRS = 4
    WALKING = 5

    @property
    def display_name(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_name(cls, name: str) -> "ActivityLabel":
        """Case-insensitive lookup; raises ValueError for unknown activities."""
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown activity: {name!r}") from None


CLASS_NAMES: tuple[str, ...] = tuple(label.display_name for label in ActivityLabel)
NUM_CLASSES = len(ActivityLabel)
