using System.Collections.Generic;
using UnityEngine;

public class InventorySystem : MonoBehaviour
{
    [SerializeField] private int capacity = 20;
    [SerializeField] private UIManager uiManager;

    private readonly List<string> items = new List<string>();

    public bool AddItem(string itemName)
    {
        if (items.Count >= capacity)
        {
            return false;
        }
        items.Add(itemName);
        NotifyChanged();
        return true;
    }

    public bool RemoveItem(string itemName)
    {
        bool removed = items.Remove(itemName);
        if (removed)
        {
            NotifyChanged();
        }
        return removed;
    }

    public bool HasItem(string itemName)
    {
        return items.Contains(itemName);
    }

    public int GetItemCount()
    {
        return items.Count;
    }

    public void Clear()
    {
        items.Clear();
        NotifyChanged();
    }

    private void NotifyChanged()
    {
        if (uiManager != null)
        {
            uiManager.UpdateScore(items.Count);
        }
    }
}
