"""Walk through the image recognition service: types, local protocols,
a conformance derivation and one complete request."""
from govcomp import Semantics, fixtures, local_protocol, modify, show_local, typeof
from govcomp.conformance import conforms
from govcomp.core import Literal

for name in fixtures.NAMES:
    program = fixtures.load(name)
    k = program.entry_component
    print(f"== {k.name}")
    print("type:", typeof(k, program.functions))
    for role, _ in k.roles:
        print(f"  {role:<7}", show_local(local_protocol(k, role)))
    print()

# Portal under the one-shot protocol: the forwarded image input is treated as
# always available, so the send on y_p is enabled straight away.
program = fixtures.load("irs")
k = program.entry_component
portal_type = modify(k.forwarders, typeof(k.role("Portal"), program.functions))
print(conforms({}, portal_type, local_protocol(k, "Portal")).render())
print()

# One request, step by step. Internal moves are taken eagerly.
sem = Semantics(program.functions)
k = sem.input(k, "x", Literal("holiday.png", "image"))
print("after x? :", typeof(k, program.functions))
while True:
    steps = sem.internal(k)
    if not steps:
        break
    rule, k = steps[0]
    print(f"{rule:<8}:", typeof(k, program.functions))
for port, value, _ in sem.outputs(k):
    print(f"{port}! {value}")
