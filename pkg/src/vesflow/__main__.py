import sys

from vesflow.cli import main

sys.exit(main())
