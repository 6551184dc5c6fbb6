import sys

from srm_benchmark.harness.cli import main

sys.exit(main())
