"""Runnable microservice scripts for executor tests (stdlib only)."""

PASSTHROUGH = b'''
import argparse
import shutil

parser = argparse.ArgumentParser()
parser.add_argument("--input")
parser.add_argument("--output")
parser.add_argument("--params")
args = parser.parse_args()
shutil.copyfile(args.input, args.output)
'''

CSV_CLEANER = b'''
import argparse
import csv

parser = argparse.ArgumentParser()
parser.add_argument("--input")
parser.add_argument("--output")
parser.add_argument("--params")
args = parser.parse_args()
with open(args.input, newline="") as f:
    rows = list(csv.reader(f))
seen = set()
deduped = [rows[0]]
for row in rows[1:]:
    key = tuple(row)
    if key not in seen:
        seen.add(key)
        deduped.append(row)
with open(args.output, "w", newline="") as f:
    csv.writer(f).writerows(deduped)
'''

CRASHER = b'''
import argparse
import sys

parser = argparse.ArgumentParser()
parser.add_argument("--input")
parser.add_argument("--output")
parser.add_argument("--params")
parser.parse_args()
print("deliberate failure for testing", file=sys.stderr)
sys.exit(1)
'''

TYPE_CRASHER = b'''
import argparse
import sys

parser = argparse.ArgumentParser()
parser.add_argument("--input")
parser.add_argument("--output")
parser.add_argument("--params")
parser.parse_args()
print("TypeError: expected csv format, received something else", file=sys.stderr)
sys.exit(1)
'''

INFINITE_LOOP = b'''
import argparse
import time

parser = argparse.ArgumentParser()
parser.add_argument("--input")
parser.add_argument("--output")
parser.add_argument("--params")
parser.parse_args()
while True:
    time.sleep(0.05)
'''

NO_OUTPUT = b'''
import argparse

parser = argparse.ArgumentParser()
parser.add_argument("--input")
parser.add_argument("--output")
parser.add_argument("--params")
parser.parse_args()
# exits 0 without writing the output file
'''

ESCAPER = b'''
import argparse
from pathlib import Path

parser = argparse.ArgumentParser()
parser.add_argument("--input")
parser.add_argument("--output")
parser.add_argument("--params")
args = parser.parse_args()
# well-behaved about its own artifact, writes nothing outside the workspace
Path(args.output).write_text(Path(args.input).read_text())
'''

MEMORY_HOG = b'''
import argparse

parser = argparse.ArgumentParser()
parser.add_argument("--input")
parser.add_argument("--output")
parser.add_argument("--params")
args = parser.parse_args()
blocks = []
for _ in range(512):
    blocks.append(bytearray(1024 * 1024))  # 512 MiB total
open(args.output, "w").write("never reached")
'''

SLOW_PASSTHROUGH = b'''
import argparse
import shutil
import time

parser = argparse.ArgumentParser()
parser.add_argument("--input")
parser.add_argument("--output")
parser.add_argument("--params")
args = parser.parse_args()
time.sleep(1.0)
shutil.copyfile(args.input, args.output)
'''

# Passes through only when invoked with training-stage params.
STRICT_TRAINER = b'''
import argparse
import json
import shutil
import sys

parser = argparse.ArgumentParser()
parser.add_argument("--input")
parser.add_argument("--output")
parser.add_argument("--params")
args = parser.parse_args()
params = json.load(open(args.params))
if "model_complexity" not in params:
    print("missing required parameter: model_complexity", file=sys.stderr)
    sys.exit(1)
shutil.copyfile(args.input, args.output)
'''

# Passes through only when invoked with bare reporting-stage params.
STRICT_REPORTER = b'''
import argparse
import json
import shutil
import sys

parser = argparse.ArgumentParser()
parser.add_argument("--input")
parser.add_argument("--output")
parser.add_argument("--params")
args = parser.parse_args()
params = json.load(open(args.params))
if "model_complexity" in params or "task_type" in params:
    print("missing required parameter: reporting params only", file=sys.stderr)
    sys.exit(1)
shutil.copyfile(args.input, args.output)
'''
