import sys

from adez.cli import main

sys.exit(main())
