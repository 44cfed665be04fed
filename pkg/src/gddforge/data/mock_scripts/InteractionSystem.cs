using UnityEngine;

public class InteractionSystem : MonoBehaviour
{
    [SerializeField] private float interactionRange = 1.5f;
    [SerializeField] private LayerMask interactableLayer;
    [SerializeField] private KeyCode interactKey = KeyCode.E;

    private Collider2D nearestInteractable;

    private void Update()
    {
        ScanForInteractables();
        if (Input.GetKeyDown(interactKey))
        {
            Interact();
        }
    }

    public void ScanForInteractables()
    {
        nearestInteractable = Physics2D.OverlapCircle(transform.position, interactionRange, interactableLayer);
    }

    public void Interact()
    {
        if (nearestInteractable == null)
        {
            return;
        }
        nearestInteractable.SendMessage("OnInteract", SendMessageOptions.DontRequireReceiver);
    }

    public bool HasInteractableInRange()
    {
        return nearestInteractable != null;
    }

    private void OnTriggerEnter(Collider other)
    {
        other.SendMessage("OnProximity", SendMessageOptions.DontRequireReceiver);
    }
}
