#!/usr/bin/env python3
# Minimal stand-in for `coqtop -emacs`: counts successful sentences, rejects
# anything starting with "fail", and answers BackTo.
#   --mute         never print a prompt
#   --garbage      print a prompt without a state number
#   --exit-after K exit after K sentences
#   --overshoot    BackTo N lands on N-1 with a warning when N > 1
import sys

args = sys.argv[1:]
mute = "--mute" in args
garbage = "--garbage" in args
overshoot = "--overshoot" in args
exit_after = None
if "--exit-after" in args:
    exit_after = int(args[args.index("--exit-after") + 1])

state = 1


def prompt():
    if mute:
        return
    if garbage:
        sys.stdout.write("<prompt>Coq < ? </prompt>")
    else:
        sys.stdout.write("<prompt>Coq < %d |Coq| 0 < </prompt>" % state)
    sys.stdout.flush()


sys.stdout.write("Welcome to Coq (fake)\n")
prompt()
handled = 0
for line in sys.stdin:
    line = line.strip()
    handled += 1
    if exit_after is not None and handled > exit_after:
        sys.exit(1)
    if line.startswith("BackTo "):
        target = int(line[len("BackTo "):].rstrip("."))
        if overshoot and target > 1:
            target -= 1
            sys.stdout.write("Warning: Actually back to state %d.\n" % target)
        state = target
    elif line.startswith("fail"):
        sys.stdout.write("Error: The reference fail was not found.\n")
    else:
        state += 1
        sys.stdout.write("ok\n")
    prompt()
