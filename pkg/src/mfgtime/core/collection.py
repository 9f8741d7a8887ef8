import pandas as pd

from mfgtime.utils.formatting import paragraph, table


class Collection:
    """
    Base class for ordered, id-keyed collections such as Populations.
    Provides common methods for access and tabular display.
    """

    def __init__(self):
        self._items = {}

    def __getitem__(self, key):
        if isinstance(key, int):
            return list(self._items.values())[key]
        return self._items[key]

    def __iter__(self):
        return iter(self._items.values())

    def __len__(self):
        return len(self._items)

    @property
    def ids(self):
        return list(self._items.keys())

    def _add_item(self, item_id, item):
        if item_id in self._items:
            raise ValueError(f"Duplicate id '{item_id}' in {self.__class__.__name__}.")
        self._items[item_id] = item

    def summary_rows(self):
        """
        Must be overridden to return one dictionary per item for display.
        """
        return [{"id": item_id} for item_id in self._items]

    def as_frame(self):
        return pd.DataFrame(self.summary_rows())

    def show_table(self):
        df = self.as_frame()
        print(paragraph(f"'{self.__class__.__name__}' overview"))
        if df.empty:
            print("No items found.")
            return
        print(table(df.values.tolist(), headers=list(df.columns)))
