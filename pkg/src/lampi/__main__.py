import sys

from lampi.cli import main

sys.exit(main())
