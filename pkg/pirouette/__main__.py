import sys

from pirouette.cli import main

sys.exit(main())
