import sys

from heatcast.cli import main

sys.exit(main())
