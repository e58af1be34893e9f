"""Feelings shape movement — the fuzzy gesture model.

The strongest of eight feeling intensities picks a movement function; the
mood value acts as the fuzzy membership degree that scales how much space
the gesture uses and how fast it runs.  Blocking contact costs 20% of the
mood, and the mood then drifts back toward its baseline.
"""

import numpy as np

from gesturebot import (
    EmotionalState,
    Feeling,
    LinkLengths,
    apply_block_event,
    default_movement_library,
    gesture_target,
    recover_mood,
    select_feeling,
)

library = default_movement_library(LinkLengths())

state = EmotionalState({Feeling.HAPPINESS: 0.8, Feeling.SURPRISE: 0.3},
                       mood=0.9, mood_baseline=0.9)
feeling = select_feeling(state)
print(f"strongest feeling: {feeling.value}\n")

print("mood   gesture amplitude   commanded speed")
neutral = library[feeling].neutral_pose.to_array()
for mu in (0.0, 0.25, 0.5, 0.75, 1.0):
    cmd = gesture_target(feeling, mu, library)
    amp = np.linalg.norm(cmd.target.to_array() - neutral)
    print(f"{mu:4.2f}   {amp:15.4f} m   {cmd.commanded_speed:12.2f} rad/s")

print("\nA user holds the robot's arm.  Each blocking contact chips 20% off:")
for i in range(3):
    state = apply_block_event(state)
    print(f"  after block {i + 1}: mood = {state.mood:.4f}")

print("\nLeft alone, the mood relaxes back toward its 0.9 baseline:")
for minutes in (1, 2, 5):
    relaxed = recover_mood(state, minutes * 60.0)
    print(f"  after {minutes} min: mood = {relaxed.mood:.4f}")
