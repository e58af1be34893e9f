"""Is someone holding the arm? — the speed-based blocking monitor.

Every 0.1 s the runtime estimates each motor's speed from its position
change.  A moving motor measured below 0.9372 of its commanded speed means
an obstacle: the runtime reports the motor and stops everything at once.
The same messages travel over a line-oriented ASCII protocol.
"""

import numpy as np

from gesturebot import (
    ArrivedEvent,
    BlockedEvent,
    MotorCommand,
    MoveMsg,
    Obstruction,
    decode_message,
    encode_message,
    run_motion,
)


def narrate(tag, events):
    print(tag)
    for e in events:
        if isinstance(e, BlockedEvent):
            print(f"  t={e.time:.2f}s BLOCKED motor {e.motor} "
                  f"(measured {e.estimated_speed:.3f} < threshold {e.threshold:.4f} rad/s)")
        elif isinstance(e, ArrivedEvent):
            print(f"  t={e.time:.2f}s ARRIVED")
    print()


cmd = MotorCommand(targets=np.full(8, 1.0), speeds=np.full(8, 1.0))

narrate("free motion:", run_motion(cmd))
narrate("motor 2 fully held from t = 0.35 s:",
        run_motion(cmd, [Obstruction(motor=2, start=0.35, duration=2.0, fraction=0.0)]))
narrate("light drag (95% speed) is tolerated:",
        run_motion(cmd, [Obstruction(motor=2, start=0.0, duration=5.0, fraction=0.95)]))

print("On the wire the same command looks like this:")
line = encode_message(MoveMsg(tuple(cmd.targets), tuple(cmd.speeds)))
print(f"  {line.strip()}")
print(f"  decodes back to {type(decode_message(line)).__name__} with identical fields")
