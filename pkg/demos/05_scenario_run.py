"""The whole loop — a happy robot, briefly held by the user.

Reproduces the bundled interaction scenario: happiness at full intensity,
mood 0.9, a gesture every 2 s, and one full obstruction of the right
shoulder motor.  Watch the mood take its 20% cut at the blocked tick, the
robot retreat to neutral, and the mood creep back afterwards.
"""

from importlib import resources

from gesturebot import RunConfig, parse_scenario, run_scenario

scenario_text = (resources.files("gesturebot") / "data"
                 / "happy_block_scenario.txt").read_text()
print("scenario file:")
for line in scenario_text.strip().splitlines():
    print(f"  {line}")
print()

timeline = run_scenario(RunConfig(), parse_scenario(scenario_text))

print("time   feeling    mood    speed   events")
for rec in timeline:
    events = ", ".join(rec.events) if rec.events else "-"
    print(f"{rec.time:4.0f}s  {rec.feeling:9s} {rec.mu:.4f}  "
          f"{rec.commanded_speed:5.2f}   {events}")

blocked = [rec for rec in timeline if any(t.startswith("BLOCKED") for t in rec.events)]
print(f"\n{len(blocked)} blocking event; mood dropped 0.9 -> {blocked[0].mu:.2f} "
      f"and the robot was sent back to its neutral pose.")
