import sys

from mfgtime.cli import main

sys.exit(main())
